#include "seqbell/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace seqbell {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      entries.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
  return entries;
}

Matrix matrix_from_json(const json& entries, Eigen::Index rows,
                        Eigen::Index cols, const char* what) {
  if (!entries.is_array() ||
      entries.size() != static_cast<std::size_t>(rows * cols))
    throw InvalidStateFile(std::string(what) + ": wrong entry count");
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j, ++k) {
      const json& e = entries[k];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() ||
          !e[1].is_number())
        throw InvalidStateFile(std::string(what) +
                               ": entries must be [re, im] pairs");
      m(i, j) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  return m;
}

json bloch_to_json(const BlochVector& v) {
  return json::array({v.x(), v.y(), v.z()});
}

BlochVector bloch_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3)
    throw InvalidSettingsFile(std::string(what) + ": expected a real 3-vector");
  return BlochVector(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidStateFile("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidStateFile("cannot write file: " + path);
  out << text;
}

json parse_json(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw InvalidStateFile(std::string(what) + ": malformed JSON");
  return j;
}

}  // namespace

std::string state_to_json_text(const BipartiteState& s) {
  json j;
  j["dims"] = json::array({s.dim_a, s.dim_b});
  j["matrix"] = matrix_to_json(s.rho);
  return j.dump();
}

BipartiteState state_from_json_text(const std::string& text) {
  json j = parse_json(text, "state file");
  if (!j.contains("dims") || !j["dims"].is_array() || j["dims"].size() != 2)
    throw InvalidStateFile("state file: missing dims [dA, dB]");
  const auto da = j["dims"][0].get<Eigen::Index>();
  const auto db = j["dims"][1].get<Eigen::Index>();
  if (da < 1 || db < 1 || da * db > kMaxTotalDim)
    throw InvalidStateFile("state file: bad dimensions");
  Matrix m = matrix_from_json(j["matrix"], da * db, da * db, "state file");
  BipartiteState s{da, db, std::move(m)};
  std::string why;
  if (!is_valid_state(s, &why))
    throw InvalidStateFile("state file: invalid state: " + why);
  return s;
}

BipartiteState load_state(const std::string& path) {
  return state_from_json_text(read_file(path));
}

void save_state(const BipartiteState& s, const std::string& path) {
  write_file(path, state_to_json_text(s) + "\n");
}

Matrix load_local_density(const std::string& path) {
  json j = parse_json(read_file(path), "local operator file");
  if (!j.contains("dims") || j["dims"].size() != 2 ||
      j["dims"][1].get<Eigen::Index>() != 1)
    throw InvalidStateFile("local operator file: expected dims [d, 1]");
  const auto d = j["dims"][0].get<Eigen::Index>();
  Matrix m = matrix_from_json(j["matrix"], d, d, "local operator file");
  std::string why;
  if (!is_valid_density(m, &why))
    throw InvalidStateFile("local operator file: " + why);
  return m;
}

namespace {

json setting_to_json(const SettingPair& s) {
  json j;
  if (const auto* bp = std::get_if<BlochPair>(&s)) {
    j["x"] = bloch_to_json(bp->x);
    j["y"] = bloch_to_json(bp->y);
  } else if (const auto* op = std::get_if<ObservablePair>(&s)) {
    j["obs_a"] = matrix_to_json(op->a);
    j["obs_b"] = matrix_to_json(op->b);
  } else {
    const auto& pp = std::get<PovmPair>(s);
    json ea = json::array(), eb = json::array();
    for (const Matrix& m : pp.a.elements) ea.push_back(matrix_to_json(m));
    for (const Matrix& m : pp.b.elements) eb.push_back(matrix_to_json(m));
    j["povm_a"] = ea;
    j["povm_b"] = eb;
  }
  return j;
}

json table_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string report_to_json_text(const SimulationReport& r) {
  json j;
  j["model"] = r.model;
  j["q"] = r.q;
  j["seed"] = r.seed;
  j["rounds"] = r.rounds;
  j["max_abs_dev"] = r.max_abs_dev;
  j["max_z"] = r.max_z;
  j["rates"] = json::object();
  for (const auto& [k, v] : r.rates) j["rates"][k] = v;
  j["settings"] = json::array();
  for (const SettingPair& s : r.settings) j["settings"].push_back(setting_to_json(s));
  json emp = json::array(), tgt = json::array();
  for (const SettingStats& st : r.per_setting) {
    json e, t;
    e["p"] = table_to_json(st.empirical);
    t["p"] = table_to_json(st.target);
    e["max_abs_dev"] = st.max_abs_dev;
    e["max_z"] = st.max_z;
    if (st.dichotomic) {
      e["correlator"] = st.emp_correlator;
      e["marginal_a"] = st.emp_marginal_a;
      e["marginal_b"] = st.emp_marginal_b;
      t["correlator"] = st.target_correlator;
      t["marginal_a"] = st.target_marginal_a;
      t["marginal_b"] = st.target_marginal_b;
    }
    emp.push_back(e);
    tgt.push_back(t);
  }
  j["empirical"] = emp;
  j["target"] = tgt;
  return j.dump(2) + "\n";
}

std::string sequential_report_to_json_text(const SequentialMcReport& r) {
  json j;
  j["seed"] = r.seed;
  j["rounds"] = r.rounds;
  j["success"] = {{"count", r.success_count},
                  {"rate", r.success_rate},
                  {"target", r.target_success_prob},
                  {"z", r.success_z}};
  json pairs = json::array();
  for (const auto& p : r.pairs) {
    json pj;
    pj["n"] = p.n;
    pj["counts"] = json::array({p.counts[0][0], p.counts[0][1], p.counts[1][0],
                                p.counts[1][1]});
    pj["correlator"] = p.emp_correlator;
    pj["target"] = p.target_correlator;
    pj["z"] = p.z;
    pairs.push_back(pj);
  }
  j["pairs"] = pairs;
  j["S"] = {{"empirical", r.empirical_S}, {"target", r.target_S}, {"z", r.S_z}};
  j["max_z"] = r.max_z;
  return j.dump(2) + "\n";
}

std::vector<SettingPair> load_settings(LhvModel model, const std::string& path) {
  json j;
  try {
    j = parse_json(read_file(path), "settings file");
  } catch (const InvalidStateFile& e) {
    throw InvalidSettingsFile(e.what());
  }
  if (!j.is_array() || j.empty())
    throw InvalidSettingsFile("settings file: expected a nonempty array");
  std::vector<SettingPair> out;
  for (const json& e : j) {
    switch (model) {
      case LhvModel::protocol1: {
        if (!e.contains("x") || !e.contains("y"))
          throw InvalidSettingsFile("settings file: expected {x, y}");
        BlochPair bp{bloch_from_json(e["x"], "x").normalized(),
                     bloch_from_json(e["y"], "y").normalized()};
        out.push_back(bp);
        break;
      }
      case LhvModel::erasure: {
        if (!e.contains("obs_a") || !e.contains("obs_b"))
          throw InvalidSettingsFile("settings file: expected {obs_a, obs_b}");
        ObservablePair op;
        op.a = matrix_from_json(e["obs_a"], 3, 3, "obs_a");
        op.b = matrix_from_json(e["obs_b"], 3, 3, "obs_b");
        out.push_back(std::move(op));
        break;
      }
      default: {
        if (!e.contains("povm_a") || !e.contains("povm_b"))
          throw InvalidSettingsFile("settings file: expected {povm_a, povm_b}");
        const Eigen::Index d = model == LhvModel::protocol2_rho_G ? 2 : 3;
        PovmPair pp;
        for (const json& m : e["povm_a"])
          pp.a.elements.push_back(matrix_from_json(m, d, d, "povm_a"));
        for (const json& m : e["povm_b"])
          pp.b.elements.push_back(matrix_from_json(m, d, d, "povm_b"));
        out.push_back(std::move(pp));
        break;
      }
    }
  }
  return out;
}

ChshSettings load_chsh_settings(const std::string& path) {
  json j;
  try {
    j = parse_json(read_file(path), "settings file");
  } catch (const InvalidStateFile& e) {
    throw InvalidSettingsFile(e.what());
  }
  for (const char* k : {"a1", "a2", "b1", "b2"})
    if (!j.contains(k))
      throw InvalidSettingsFile("CHSH settings file: missing " + std::string(k));
  ChshSettings c;
  c.a1 = bloch_from_json(j["a1"], "a1").normalized();
  c.a2 = bloch_from_json(j["a2"], "a2").normalized();
  c.b1 = bloch_from_json(j["b1"], "b1").normalized();
  c.b2 = bloch_from_json(j["b2"], "b2").normalized();
  return c;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace seqbell
