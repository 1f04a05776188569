#include "sitrec/pipeline.hpp"

#include "sitrec/graph_builder.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

namespace sitrec::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
  if (auto* s = dynamic_cast<const StageError*>(&e)) return s->exit_code();
  if (dynamic_cast<const ConfigError*>(&e)) return kConfigError;
  if (dynamic_cast<const DataError*>(&e)) return kDataError;
  if (dynamic_cast<const NumericalError*>(&e)) return kNumericalError;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return kDataError;
  return kFailure;
}

StageError::StageError(std::string stage, const std::exception& cause)
    : std::runtime_error("[" + stage + "] " + cause.what()),
      stage_(std::move(stage)),
      code_(exit_code_for(cause)) {}

void PipelineConfig::validate() const {
  solver.validate();
  resolution.validate();
  if (input.empty()) throw ConfigError("no input file given");
  if (!(u_labeled > 0.0)) throw ConfigError("u_labeled must be positive");
  if (!(u_unlabeled >= 0.0)) throw ConfigError("u_unlabeled must be nonnegative");
  if (id_column.empty()) throw ConfigError("id column name is empty");
}

PipelineConfig apply_config_file(const fs::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "input") base.input = v.get<std::string>();
      else if (key == "output_dir") base.output_dir = v.get<std::string>();
      else if (key == "method") base.solver.method = parse_method(v.get<std::string>());
      else if (key == "graph") base.graph = parse_graph_kind(v.get<std::string>());
      else if (key == "k") base.solver.k = v.get<int>();
      else if (key == "p_exp") base.solver.p_exp = v.get<double>();
      else if (key == "theta") base.solver.theta = v.get<double>();
      else if (key == "max_iter") base.solver.max_iter = v.get<int>();
      else if (key == "tol") base.solver.tol = v.get<double>();
      else if (key == "eps") base.solver.eps = v.get<double>();
      else if (key == "sigma") base.solver.sigma = v.get<std::vector<double>>();
      else if (key == "u_labeled") base.u_labeled = v.get<double>();
      else if (key == "u_unlabeled") base.u_unlabeled = v.get<double>();
      else if (key == "id_column") base.id_column = v.get<std::string>();
      else if (key == "label_column") base.label_column = v.get<std::string>();
      else if (key == "lat_column") base.lat_column = v.get<std::string>();
      else if (key == "lon_column") base.lon_column = v.get<std::string>();
      else if (key == "time_column") base.time_column = v.get<std::string>();
      else if (key == "lat_res") base.resolution.lat_deg = v.get<double>();
      else if (key == "lon_res") base.resolution.lon_deg = v.get<double>();
      else if (key == "time_res") base.resolution.time_s = v.get<long long>();
      else if (key == "seed") base.seed = v.get<std::uint64_t>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  return base;
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

template <class T>
bool parse_full(const std::string& text, T& value) {
  const auto s = trim(text);
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

Dataset ingest(const fs::path& path, const PipelineConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open input file " + path.string());

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) {
      header = split_csv(line);
      break;
    }
  }
  if (header.empty()) throw DataError("input file " + path.string() + " has no header row");
  for (auto& h : header) h = trim(h);

  auto find_col = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto id_col = find_col(config.id_column);
  if (!id_col) throw DataError(at_line(line_no) + "missing id column '" + config.id_column + "'");
  const auto label_col = find_col(config.label_column);
  const auto lat_col = find_col(config.lat_column);
  const auto lon_col = find_col(config.lon_column);
  const auto time_col = find_col(config.time_column);
  const int geo_present = (lat_col ? 1 : 0) + (lon_col ? 1 : 0) + (time_col ? 1 : 0);
  if (geo_present != 0 && geo_present != 3) {
    throw DataError(at_line(line_no) + "need all of '" + config.lat_column + "', '" +
                    config.lon_column + "', '" + config.time_column + "' or none");
  }

  std::set<std::size_t> reserved{*id_col};
  if (label_col) reserved.insert(*label_col);
  if (geo_present) reserved.insert({*lat_col, *lon_col, *time_col});
  Dataset data;
  std::vector<std::size_t> feature_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!reserved.count(i)) {
      feature_cols.push_back(i);
      data.feature_names.push_back(header[i]);
    }
  }
  if (feature_cols.empty()) throw DataError(at_line(line_no) + "no feature columns");

  std::vector<std::vector<double>> rows;
  std::vector<std::optional<GeoTime>> meta;
  std::unordered_map<std::string, std::size_t> seen_ids;
  std::unordered_map<std::string, int> class_ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw DataError(at_line(line_no) + "expected " + std::to_string(header.size()) +
                      " fields, got " + std::to_string(fields.size()));
    }
    const auto id = trim(fields[*id_col]);
    if (id.empty()) throw DataError(at_line(line_no) + "empty id");
    if (auto [it, fresh] = seen_ids.emplace(id, line_no); !fresh) {
      throw DataError(at_line(line_no) + "duplicate id '" + id + "' (first seen on line " +
                      std::to_string(it->second) + ")");
    }
    std::vector<double> row(feature_cols.size());
    for (std::size_t z = 0; z < feature_cols.size(); ++z) {
      const auto& text = fields[feature_cols[z]];
      if (!parse_full(text, row[z])) {
        throw DataError(at_line(line_no) + "non-numeric value '" + trim(text) +
                        "' in feature column '" + header[feature_cols[z]] + "'");
      }
      if (!std::isfinite(row[z])) {
        throw DataError(at_line(line_no) + "non-finite value in feature column '" +
                        header[feature_cols[z]] + "'");
      }
    }
    const auto item = rows.size();
    rows.push_back(std::move(row));
    data.ids.push_back(id);

    if (label_col) {
      const auto name = trim(fields[*label_col]);
      if (!name.empty()) {
        auto [it, fresh] = class_ids.emplace(name, static_cast<int>(data.class_names.size()));
        if (fresh) data.class_names.push_back(name);
        data.labels.assignments.emplace(item, it->second);
      }
    }
    if (geo_present) {
      const auto& lat = fields[*lat_col];
      const auto& lon = fields[*lon_col];
      const auto& ts = fields[*time_col];
      if (trim(lat).empty() || trim(lon).empty() || trim(ts).empty()) {
        meta.emplace_back();
      } else {
        GeoTime g;
        if (!parse_full(lat, g.latitude) || !parse_full(lon, g.longitude) ||
            !parse_full(ts, g.timestamp)) {
          throw DataError(at_line(line_no) + "non-numeric latitude/longitude/timestamp");
        }
        meta.emplace_back(g);
      }
    }
  }
  if (rows.size() < 2) throw DataError("input file " + path.string() + " has fewer than 2 items");

  Eigen::MatrixXd items(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(feature_cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t z = 0; z < feature_cols.size(); ++z) {
      items(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(z)) = rows[i][z];
    }
  }
  data.x = FeatureMatrix(std::move(items), std::move(meta));
  data.labels.num_classes = static_cast<int>(data.class_names.size());
  data.labels.u_labeled = config.u_labeled;
  data.labels.u_unlabeled = config.u_unlabeled;
  return data;
}

void export_dataset(const Dataset& data, const fs::path& path, const PipelineConfig& config) {
  auto out = open_out(path);
  out << quote_csv(config.id_column);
  for (const auto& name : data.feature_names) out << ',' << quote_csv(name);
  out << ',' << quote_csv(config.label_column);
  const bool geo = data.x.has_meta();
  if (geo) {
    out << ',' << quote_csv(config.lat_column) << ',' << quote_csv(config.lon_column) << ','
        << quote_csv(config.time_column);
  }
  out << '\n';
  const auto& items = data.x.items();
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    out << quote_csv(data.ids[i]);
    for (Eigen::Index z = 0; z < items.cols(); ++z) {
      out << ',' << format_number(items(static_cast<Eigen::Index>(i), z));
    }
    out << ',';
    if (auto it = data.labels.assignments.find(i); it != data.labels.assignments.end()) {
      out << quote_csv(data.class_names.at(static_cast<std::size_t>(it->second)));
    }
    if (geo) {
      const auto& m = data.x.meta()[i];
      if (m) {
        out << ',' << format_number(m->latitude) << ',' << format_number(m->longitude) << ','
            << m->timestamp;
      } else {
        out << ",,,";
      }
    }
    out << '\n';
  }
}

namespace {

using Clock = std::chrono::steady_clock;

template <class Fn>
auto run_stage(const std::string& name, json& timings, Fn&& fn) {
  const auto start = Clock::now();
  auto record = [&] {
    timings[name + "_ms"] =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  };
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record();
    } else {
      auto value = fn();
      record();
      return value;
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e);
  }
}

json solver_json(const PipelineConfig& config) {
  json j;
  j["method"] = to_string(config.solver.method);
  j["graph"] = to_string(config.graph);
  j["k"] = config.solver.k;
  j["p_exp"] = config.solver.p_exp;
  j["theta"] = config.solver.theta;
  j["max_iter"] = config.solver.max_iter;
  j["tol"] = config.solver.tol;
  j["eps"] = config.solver.eps;
  j["u_labeled"] = config.u_labeled;
  j["u_unlabeled"] = config.u_unlabeled;
  if (config.solver.sigma) j["sigma"] = *config.solver.sigma;
  return j;
}

void write_outputs(const PipelineConfig& config, const PipelineOutcome& o) {
  const auto& dir = config.output_dir;
  fs::create_directories(dir);
  const auto& f = o.result.f;
  const int c = o.data.labels.num_classes;

  {
    auto out = open_out(dir / "assignments.csv");
    out << "id,assigned_label,is_novel,max_score\n";
    for (std::size_t i = 0; i < o.data.ids.size(); ++i) {
      const int a = o.result.assignments[i];
      out << quote_csv(o.data.ids[i]) << ',' << (a + 1) << ',' << (a == c ? 1 : 0) << ','
          << format_number(f(static_cast<Eigen::Index>(i), a)) << '\n';
    }
  }
  {
    auto out = open_out(dir / "softlabels.csv");
    out << "id";
    for (int j = 1; j <= c + 1; ++j) out << ",f_" << j;
    out << '\n';
    for (std::size_t i = 0; i < o.data.ids.size(); ++i) {
      out << quote_csv(o.data.ids[i]);
      for (Eigen::Index j = 0; j < f.cols(); ++j) {
        out << ',' << format_number(f(static_cast<Eigen::Index>(i), j));
      }
      out << '\n';
    }
  }
  {
    auto out = open_out(dir / "labels.csv");
    out << "label_id,name\n";
    for (int j = 0; j < c; ++j) {
      out << (j + 1) << ',' << quote_csv(o.data.class_names[static_cast<std::size_t>(j)]) << '\n';
    }
    out << (c + 1) << ",novel\n";
  }
  {
    json s;
    s["solver"] = solver_json(config);
    s["items"] = o.data.x.size();
    s["features"] = o.data.x.dim();
    s["known_classes"] = c;
    s["labeled_items"] = o.data.labels.assignments.size();
    s["graph_edges"] = upper_edges(o.graph.w).size();
    s["degenerate_rows"] = o.graph.degenerate_rows.size();
    s["iterations"] = o.result.iterations;
    s["converged"] = o.result.converged;
    s["all_edges_capped"] = o.result.all_edges_capped;
    s["objective_trace"] = o.result.objective_trace;
    s["residuals"] = o.result.residuals;
    std::vector<int> counts(static_cast<std::size_t>(c + 1), 0);
    for (int a : o.result.assignments) ++counts[static_cast<std::size_t>(a)];
    s["assignment_counts"] = counts;
    s["timings_file"] = "timings.json";
    open_out(dir / "summary.json") << s.dump(2) << '\n';
  }
  if (o.summary) {
    const auto& sm = *o.summary;
    {
      auto out = open_out(dir / "spacetime.csv");
      out << "lat_bin,lon_bin,time_bin,label,count\n";
      for (const auto& [key, count] : sm.counts) {
        const auto& [cell, label] = key;
        out << cell.lat_bin << ',' << cell.lon_bin << ',' << cell.time_bin << ',' << (label + 1)
            << ',' << count << '\n';
      }
    }
    json j;
    j["resolution"] = {{"lat_deg", sm.resolution.lat_deg},
                       {"lon_deg", sm.resolution.lon_deg},
                       {"time_s", sm.resolution.time_s}};
    j["total"] = sm.total;
    j["missing"] = sm.missing;
    json invalid = json::array();
    for (auto i : sm.invalid) invalid.push_back(o.data.ids[i]);
    j["invalid"] = invalid;
    json labels = json::array();
    for (const auto& [label, bins] : sm.time_marginal) {
      json entry;
      entry["label"] = label + 1;
      entry["name"] = label < c ? o.data.class_names[static_cast<std::size_t>(label)] : "novel";
      json tm = json::array();
      for (const auto& [bin, count] : bins) tm.push_back({bin, count});
      entry["time"] = tm;
      json sp = json::array();
      for (const auto& [place, count] : sm.space_marginal.at(label)) {
        sp.push_back({place.lat_bin, place.lon_bin, count});
      }
      entry["space"] = sp;
      labels.push_back(entry);
    }
    j["labels"] = labels;
    open_out(dir / "spacetime.json") << j.dump(2) << '\n';
  }
}

}  // namespace

PipelineOutcome run_pipeline(const PipelineConfig& config) {
  json timings;
  run_stage("config", timings, [&] { config.validate(); });

  PipelineOutcome o;
  o.data = run_stage("ingest", timings, [&] {
    auto d = ingest(config.input, config);
    d.labels.validate(d.x.size());
    return d;
  });
  o.graph = run_stage("graph", timings, [&] {
    return build_graph(o.data.x, config.graph, static_cast<std::size_t>(config.solver.k),
                       config.solver.sigma.value_or(std::vector<double>{}));
  });
  o.result = run_stage("solve", timings, [&] {
    const auto n = o.data.x.size();
    return solve(o.graph, build_indicator(o.data.labels, n),
                 build_fitting_weights(o.data.labels, n), config.solver);
  });
  if (o.data.x.has_meta()) {
    o.summary = run_stage("aggregate", timings, [&] {
      return spacetime::aggregate(o.result.assignments, o.data.x.meta(), config.resolution);
    });
  }
  run_stage("write", timings, [&] { write_outputs(config, o); });
  try {
    open_out(config.output_dir / "timings.json") << timings.dump(2) << '\n';
  } catch (const std::exception& e) {
    throw StageError("write", e);
  }
  return o;
}

// --- benchmarks -------------------------------------------------------------

namespace {

std::string class_name(int cls, int c) {
  if (cls == eval::kNoise) return "noise";
  return cls == c ? "novel" : std::to_string(cls + 1);
}

json report_json(const eval::EvalReport& r, Method m) {
  json j;
  j["method"] = to_string(m);
  j["acc_known"] = r.acc_known;
  j["acc_unknown"] = r.acc_unknown;
  j["n_known"] = r.n_known;
  j["n_unknown"] = r.n_unknown;
  json conf = json::array();
  for (Eigen::Index i = 0; i < r.confusion.rows(); ++i) {
    std::vector<int> copy;
    for (Eigen::Index k = 0; k < r.confusion.cols(); ++k) copy.push_back(r.confusion(i, k));
    conf.push_back(copy);
  }
  j["confusion"] = conf;
  j["noise_row"] = r.noise_row;
  j["p_exp"] = r.params.p_exp;
  j["theta"] = r.params.theta;
  j["k"] = r.params.k;
  return j;
}

struct PreparedBench {
  eval::SyntheticData data;
  SimilarityGraph graph;
};

PreparedBench prepare(const BenchOptions& opts) {
  PreparedBench b{eval::generate(opts.spec), {}};
  b.data.labels.u_labeled = opts.u_labeled;
  b.data.labels.u_unlabeled = opts.u_unlabeled;
  b.graph = build_graph(b.data.x, opts.graph, static_cast<std::size_t>(opts.solver.k),
                        opts.solver.sigma.value_or(std::vector<double>{}));
  return b;
}

}  // namespace

std::vector<eval::EvalReport> bench_eval(const BenchOptions& opts) {
  const auto b = prepare(opts);
  const auto n = b.data.x.size();
  const auto y = build_indicator(b.data.labels, n);
  const auto u = build_fitting_weights(b.data.labels, n);
  const int c = b.data.truth.num_classes;
  fs::create_directories(opts.output_dir);

  std::vector<eval::EvalReport> reports;
  auto all = open_out(opts.output_dir / "reports.csv");
  all << "method,acc_known,acc_unknown,n_known,n_unknown,iterations,converged\n";
  for (Method m : {Method::GSS, Method::L1, Method::Capped}) {
    SolverConfig cfg = opts.solver;
    cfg.method = m;
    const auto res = solve(b.graph, y, u, cfg);
    auto rep = eval::evaluate(res, b.data.truth, cfg);

    auto out = open_out(opts.output_dir / ("report_" + to_string(m) + ".csv"));
    out << "true_class,count";
    for (int a = 0; a <= c; ++a) out << ",assigned_" << class_name(a, c);
    out << ",accuracy\n";
    for (int t = 0; t <= c; ++t) {
      const int total = rep.confusion.row(t).sum();
      const int hit = rep.confusion(t, t);
      out << class_name(t, c) << ',' << total;
      for (int a = 0; a <= c; ++a) out << ',' << rep.confusion(t, a);
      out << ',' << (total ? format_number(100.0 * hit / total) : std::string()) << '\n';
    }
    int noise_total = 0;
    for (int v : rep.noise_row) noise_total += v;
    out << "noise," << noise_total;
    for (int v : rep.noise_row) out << ',' << v;
    out << ",\n";

    open_out(opts.output_dir / ("report_" + to_string(m) + ".json")) << report_json(rep, m).dump(2)
                                                                     << '\n';
    all << to_string(m) << ',' << format_number(rep.acc_known) << ','
        << format_number(rep.acc_unknown) << ',' << rep.n_known << ',' << rep.n_unknown << ','
        << res.iterations << ',' << (res.converged ? 1 : 0) << '\n';
    reports.push_back(std::move(rep));
  }
  return reports;
}

eval::GridResult bench_grid(const BenchOptions& opts, const eval::GridSpec& grids) {
  const auto b = prepare(opts);
  eval::GridSpec g = grids;
  g.u_unlabeled = opts.u_unlabeled;
  if (!g.threads) g.threads = opts.threads;
  auto result = eval::grid_search(b.graph, b.data.labels, g, opts.solver);
  fs::create_directories(opts.output_dir);
  for (Method m : g.methods) {
    auto out = open_out(opts.output_dir / ("grid_" + to_string(m) + ".csv"));
    out << "method,u_labeled,theta,p_exp,mean_acc,folds_used\n";
    for (const auto& row : result.table) {
      if (row.method != m) continue;
      out << to_string(m) << ',' << format_number(row.u_labeled) << ',';
      if (m == Method::Capped) out << format_number(row.theta) << ',' << format_number(row.p_exp);
      else out << ',';
      out << ',' << format_number(row.mean_acc) << ',' << row.folds_used << '\n';
    }
  }
  json best = json::array();
  for (const auto& bc : result.best) {
    json j;
    j["method"] = to_string(bc.config.method);
    j["u_labeled"] = bc.u_labeled;
    j["mean_acc"] = bc.mean_acc;
    if (bc.config.method == Method::Capped) {
      j["theta"] = bc.config.theta;
      j["p_exp"] = bc.config.p_exp;
    }
    best.push_back(j);
  }
  json doc;
  doc["best"] = best;
  doc["warnings"] = result.warnings;
  open_out(opts.output_dir / "grid_best.json") << doc.dump(2) << '\n';
  return result;
}

eval::RobustnessSummary bench_robustness(const BenchOptions& opts, int seeds) {
  auto summary = eval::robustness_study(opts.spec, seeds, opts.solver, opts.graph, opts.u_labeled,
                                        opts.u_unlabeled, opts.threads);
  fs::create_directories(opts.output_dir);
  auto out = open_out(opts.output_dir / "robustness.csv");
  out << "seed,gss_known,l1_known,capped_known,gss_unknown,l1_unknown,capped_unknown\n";
  auto row_out = [&](const std::string& key, const double* known, const double* unknown) {
    out << key;
    for (int m = 0; m < 3; ++m) out << ',' << format_number(known[m]);
    for (int m = 0; m < 3; ++m) out << ',' << format_number(unknown[m]);
    out << '\n';
  };
  for (const auto& r : summary.rows) row_out(std::to_string(r.seed), r.known, r.unknown);
  row_out("mean", summary.mean_known, summary.mean_unknown);

  json j;
  j["seeds"] = seeds;
  j["outlier_fraction"] = opts.spec.outlier_fraction;
  j["mean_known"] = {{"gss", summary.mean_known[0]}, {"l1", summary.mean_known[1]},
                     {"capped", summary.mean_known[2]}};
  j["mean_unknown"] = {{"gss", summary.mean_unknown[0]}, {"l1", summary.mean_unknown[1]},
                       {"capped", summary.mean_unknown[2]}};
  j["l1_minus_gss"] = summary.mean_known[1] - summary.mean_known[0];
  j["capped_minus_gss"] = summary.mean_known[2] - summary.mean_known[0];
  j["l1_not_worse"] = summary.l1_not_worse;
  j["capped_not_worse"] = summary.capped_not_worse;
  open_out(opts.output_dir / "robustness.json") << j.dump(2) << '\n';
  return summary;
}

void write_synthetic(const eval::SyntheticData& data, const fs::path& path, bool with_meta,
                     std::uint64_t seed) {
  Dataset d;
  const auto n = data.x.size();
  const int width = static_cast<int>(std::to_string(n).size());
  for (std::size_t i = 0; i < n; ++i) {
    auto num = std::to_string(i + 1);
    d.ids.push_back("item_" + std::string(static_cast<std::size_t>(width) - num.size(), '0') + num);
  }
  for (std::size_t z = 0; z < data.x.dim(); ++z) d.feature_names.push_back("f_" + std::to_string(z + 1));
  for (int c = 0; c < data.labels.num_classes; ++c) d.class_names.push_back("class_" + std::to_string(c + 1));
  d.labels = data.labels;

  std::vector<std::optional<GeoTime>> meta;
  if (with_meta) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lat(-60.0, 60.0);
    std::uniform_real_distribution<double> lon(-180.0, 180.0);
    std::uniform_int_distribution<long long> ts(1293840000LL, 1420070399LL);  // 2011-2014
    for (std::size_t i = 0; i < n; ++i) {
      GeoTime g;
      g.latitude = std::round(lat(rng) * 1e4) / 1e4;
      g.longitude = std::round(lon(rng) * 1e4) / 1e4;
      g.timestamp = ts(rng);
      meta.emplace_back(g);
    }
  }
  d.x = FeatureMatrix(data.x.items(), std::move(meta));
  export_dataset(d, path);
}

}  // namespace sitrec::pipeline
