#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

std::string cli_path() {
  const char* env = std::getenv("CARDIOFOREST_BIN");
  REQUIRE_MESSAGE(env != nullptr, "CARDIOFOREST_BIN must point at the CLI binary");
  return env;
}

int run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("missing file: " + path).c_str());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

const std::string kDir = "/tmp/cardioforest_cli_tests";

struct Workspace {
  Workspace() {
    if (std::system(("rm -rf " + kDir + " && mkdir -p " + kDir).c_str()) != 0) {
      std::abort();
    }
  }
};
const Workspace workspace;

std::string path(const std::string& name) { return kDir + "/" + name; }

}  // namespace

TEST_CASE("synth: row count, determinism, and validation exit code") {
  REQUIRE(run("synth --n 1000 --prevalence 0.1546 --seed 42 --out " + path("a.csv")) == 0);
  const std::string a = slurp(path("a.csv"));
  std::size_t lines = 0;
  for (const char c : a) lines += c == '\n' ? 1 : 0;
  CHECK(lines == 1001);  // header + rows

  REQUIRE(run("synth --n 1000 --prevalence 0.1546 --seed 42 --out " + path("b.csv")) == 0);
  CHECK(a == slurp(path("b.csv")));

  CHECK(run("synth --n 10 --prevalence 1.5 --out " + path("bad.csv")) == 2);
  CHECK(run("synth") == 2);  // missing required --out
}

TEST_CASE("prep: duplicate counting, identity pass, schema failure") {
  // One duplicated (subject_id, study_id) pair and one implausible value.
  write_file(path("raw.csv"),
             "subject_id,study_id,rr_interval,qrs_duration\n"
             "1,10,800,100\n"
             "1,10,800,100\n"
             "2,20,-5,130\n"
             "3,30,,95\n");
  REQUIRE(run("prep --in " + path("raw.csv") + " --out " + path("clean.csv") + " --report " +
              path("rep.json")) == 0);
  const nlohmann::json report = nlohmann::json::parse(slurp(path("rep.json")));
  CHECK(report.at("rows_in") == 4);
  CHECK(report.at("rows_out") == 3);
  CHECK(report.at("duplicates_removed") == 1);
  CHECK(report.at("flagged").at("rr_interval") == 1);
  // Two gaps in rr_interval after repair: the implausible -5 and the blank.
  CHECK(report.at("imputed").at("rr_interval") == 2);

  // The cleaned file has a derived label column and no gaps.
  const std::string clean = slurp(path("clean.csv"));
  CHECK(clean.find("wct_label") != std::string::npos);

  // Re-running prep on its own output changes nothing and removes nothing.
  REQUIRE(run("prep --in " + path("clean.csv") + " --out " + path("clean2.csv") + " --report " +
              path("rep2.json")) == 0);
  const nlohmann::json report2 = nlohmann::json::parse(slurp(path("rep2.json")));
  CHECK(report2.at("duplicates_removed") == 0);
  CHECK(slurp(path("clean2.csv")) == clean);

  // Missing the required qrs_duration column.
  write_file(path("noqrs.csv"), "subject_id,study_id,rr_interval\n1,1,800\n");
  CHECK(run("prep --in " + path("noqrs.csv") + " --out " + path("x.csv")) == 3);
  CHECK(run("prep --in " + path("nonexistent.csv") + " --out " + path("x.csv")) == 3);
}

TEST_CASE("prep: label encoding of text categories lands in the report") {
  write_file(path("cat.csv"),
             "subject_id,study_id,qrs_duration,report_0\n"
             "1,1,100,Normal\n"
             "2,2,130,Abnormal\n"
             "3,3,90,Pending\n");
  REQUIRE(run("prep --in " + path("cat.csv") + " --out " + path("cat_clean.csv") + " --report " +
              path("cat_rep.json")) == 0);
  const nlohmann::json report = nlohmann::json::parse(slurp(path("cat_rep.json")));
  CHECK(report.at("codec").at("report_0").at("Abnormal") == 0);
  CHECK(report.at("codec").at("report_0").at("Normal") == 1);
  CHECK(report.at("codec").at("report_0").at("Pending") == 2);
}

TEST_CASE("train, predict, and explain flow with exit-code discipline") {
  REQUIRE(run("synth --n 400 --seed 7 --out " + path("train.csv")) == 0);
  REQUIRE(run("train --in " + path("train.csv") + " --model cardioforest --n_estimators 20 "
              "--out " + path("model.json")) == 0);

  REQUIRE(run("predict --model " + path("model.json") + " --in " + path("train.csv") +
              " --out " + path("preds.csv")) == 0);
  const std::string preds = slurp(path("preds.csv"));
  CHECK(preds.rfind("sample_id,probability,label\n", 0) == 0);
  {
    std::istringstream in(preds);
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      const std::size_t c1 = line.find(',');
      const std::size_t c2 = line.find(',', c1 + 1);
      const double prob = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
      const int label = std::stoi(line.substr(c2 + 1));
      CHECK(prob >= 0.0);
      CHECK(prob <= 1.0);
      CHECK((label == 0 || label == 1));
    }
    CHECK(rows == 400);
  }

  // Feature mismatch at predict time is a model error (4).
  write_file(path("narrow.csv"), "rr_interval,qrs_duration\n800,100\n");
  CHECK(run("predict --model " + path("model.json") + " --in " + path("narrow.csv") + " --out " +
            path("p2.csv")) == 4);

  REQUIRE(run("explain --model " + path("model.json") + " --in " + path("train.csv") + " --out " +
              path("shap.csv") + " --summary " + path("summary.csv")) == 0);
  const std::string summary = slurp(path("summary.csv"));
  CHECK(summary.rfind("# space=probability", 0) == 0);
  // Rule-labeled data concentrates importance on the duration column.
  std::istringstream sin(summary);
  std::string line;
  std::getline(sin, line);  // comment
  std::getline(sin, line);  // header
  std::getline(sin, line);  // rank 1
  CHECK(line.rfind("qrs_duration,", 0) == 0);

  const std::string shap = slurp(path("shap.csv"));
  CHECK(shap.find("sample_id,feature,shap_value,feature_value") != std::string::npos);
}

TEST_CASE("train on single-class labels exits 4") {
  write_file(path("single.csv"),
             "rr_interval,p_onset,p_end,qrs_onset,qrs_end,t_end,p_axis,qrs_axis,t_axis,"
             "qrs_duration,wct_label\n"
             "800,100,200,280,380,600,40,50,60,100,0\n"
             "810,105,205,285,385,605,45,55,65,101,0\n"
             "820,110,210,290,390,610,50,60,70,102,0\n");
  CHECK(run("train --in " + path("single.csv") + " --model xgb --out " + path("m.json")) == 4);
}

TEST_CASE("cv: report shape, byte determinism, and thread independence") {
  REQUIRE(run("synth --n 300 --seed 11 --out " + path("cv.csv")) == 0);
  const std::string base =
      "cv --in " + path("cv.csv") + " --models lgbm,gbm --k 5 --seed 42";
  REQUIRE(run(base + " --out-csv " + path("r1.csv") + " --out-json " + path("r1.json")) == 0);
  REQUIRE(run(base + " --out-csv " + path("r2.csv") + " --out-json " + path("r2.json")) == 0);
  CHECK(slurp(path("r1.csv")) == slurp(path("r2.csv")));
  CHECK(slurp(path("r1.json")) == slurp(path("r2.json")));

  REQUIRE(run(base + " --threads 1 --out-csv " + path("t1.csv")) == 0);
  REQUIRE(run(base + " --threads 3 --out-csv " + path("t3.csv")) == 0);
  CHECK(slurp(path("t1.csv")) == slurp(path("t3.csv")));

  const std::string csv = slurp(path("r1.csv"));
  std::size_t lines = 0;
  for (const char c : csv) lines += c == '\n' ? 1 : 0;
  CHECK(lines == 1 + 2 * 5);  // header + 2 models x 5 folds
  CHECK(csv.rfind("Model,Fold,Accuracy,Balanced Accuracy,Precision,Recall,F1,ROC_AUC,RMSE,MAE\n",
                  0) == 0);
}

TEST_CASE("config file sets parameters and flags win over it") {
  REQUIRE(run("synth --n 200 --seed 13 --out " + path("cfg_data.csv")) == 0);
  write_file(path("cfg.json"), R"({"xgb": {"n_estimators": 2, "max_depth": 1}})");

  REQUIRE(run("train --in " + path("cfg_data.csv") + " --model xgb --config " + path("cfg.json") +
              " --out " + path("cfg_model.json")) == 0);
  const nlohmann::json m1 = nlohmann::json::parse(slurp(path("cfg_model.json")));
  CHECK(m1.at("params").at("n_estimators") == 2);
  CHECK(m1.at("params").at("max_depth") == 1);

  REQUIRE(run("train --in " + path("cfg_data.csv") + " --model xgb --config " + path("cfg.json") +
              " --n_estimators 4 --out " + path("cfg_model2.json")) == 0);
  const nlohmann::json m2 = nlohmann::json::parse(slurp(path("cfg_model2.json")));
  CHECK(m2.at("params").at("n_estimators") == 4);
  CHECK(m2.at("params").at("max_depth") == 1);

  CHECK(run("train --in " + path("cfg_data.csv") + " --model xgb --config " +
            path("missing_config.json") + " --out " + path("x.json")) == 2);

  // random_state from the config is honored unless --seed is given.
  write_file(path("cfg_seed.json"), R"({"xgb": {"n_estimators": 2, "random_state": 777}})");
  REQUIRE(run("train --in " + path("cfg_data.csv") + " --model xgb --config " +
              path("cfg_seed.json") + " --out " + path("cfg_model3.json")) == 0);
  CHECK(nlohmann::json::parse(slurp(path("cfg_model3.json"))).at("params").at("random_state") ==
        777);
  REQUIRE(run("train --in " + path("cfg_data.csv") + " --model xgb --config " +
              path("cfg_seed.json") + " --seed 9 --out " + path("cfg_model4.json")) == 0);
  CHECK(nlohmann::json::parse(slurp(path("cfg_model4.json"))).at("params").at("random_state") ==
        9);
}

TEST_CASE("prep, predict, and explain are byte-idempotent") {
  REQUIRE(run("synth --n 150 --seed 23 --out " + path("idem.csv")) == 0);
  REQUIRE(run("prep --in " + path("idem.csv") + " --out " + path("idem_p1.csv") + " --report " +
              path("idem_r1.json")) == 0);
  REQUIRE(run("prep --in " + path("idem.csv") + " --out " + path("idem_p2.csv") + " --report " +
              path("idem_r2.json")) == 0);
  CHECK(slurp(path("idem_p1.csv")) == slurp(path("idem_p2.csv")));
  CHECK(slurp(path("idem_r1.json")) == slurp(path("idem_r2.json")));

  REQUIRE(run("train --in " + path("idem.csv") + " --model xgb --out " + path("idem_m.json")) ==
          0);
  REQUIRE(run("predict --model " + path("idem_m.json") + " --in " + path("idem.csv") + " --out " +
              path("idem_q1.csv")) == 0);
  REQUIRE(run("predict --model " + path("idem_m.json") + " --in " + path("idem.csv") + " --out " +
              path("idem_q2.csv")) == 0);
  CHECK(slurp(path("idem_q1.csv")) == slurp(path("idem_q2.csv")));

  REQUIRE(run("explain --model " + path("idem_m.json") + " --in " + path("idem.csv") + " --out " +
              path("idem_s1.csv") + " --summary " + path("idem_u1.csv")) == 0);
  REQUIRE(run("explain --model " + path("idem_m.json") + " --in " + path("idem.csv") + " --out " +
              path("idem_s2.csv") + " --summary " + path("idem_u2.csv")) == 0);
  CHECK(slurp(path("idem_s1.csv")) == slurp(path("idem_s2.csv")));
  CHECK(slurp(path("idem_u1.csv")) == slurp(path("idem_u2.csv")));
}

TEST_CASE("commands do not mutate their inputs") {
  REQUIRE(run("synth --n 120 --seed 17 --out " + path("immutable.csv")) == 0);
  const std::string before = slurp(path("immutable.csv"));
  REQUIRE(run("train --in " + path("immutable.csv") + " --model lgbm --out " +
              path("im_model.json")) == 0);
  REQUIRE(run("predict --model " + path("im_model.json") + " --in " + path("immutable.csv") +
              " --out " + path("im_preds.csv")) == 0);
  REQUIRE(run("cv --in " + path("immutable.csv") + " --models lgbm --k 3 --out-csv " +
              path("im_cv.csv")) == 0);
  CHECK(slurp(path("immutable.csv")) == before);
}

TEST_CASE("train and model files are byte-deterministic") {
  REQUIRE(run("synth --n 250 --seed 19 --out " + path("det.csv")) == 0);
  REQUIRE(run("train --in " + path("det.csv") + " --model gbm --out " + path("det1.json")) == 0);
  REQUIRE(run("train --in " + path("det.csv") + " --model gbm --out " + path("det2.json")) == 0);
  CHECK(slurp(path("det1.json")) == slurp(path("det2.json")));

  // Serialized forests must not depend on the worker count either.
  REQUIRE(run("train --in " + path("det.csv") + " --model cardioforest --n_estimators 12 "
              "--threads 1 --out " + path("f1.json")) == 0);
  REQUIRE(run("train --in " + path("det.csv") + " --model cardioforest --n_estimators 12 "
              "--threads 3 --out " + path("f3.json")) == 0);
  CHECK(slurp(path("f1.json")) == slurp(path("f3.json")));
}
