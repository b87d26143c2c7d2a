#include "gigp/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gigp/chaotic.hpp"
#include "gigp/diagram.hpp"
#include "gigp/error.hpp"
#include "gigp/fitgof.hpp"
#include "gigp/model.hpp"
#include "gigp/partition.hpp"
#include "gigp/shape.hpp"
#include "gigp/specfun.hpp"

namespace gigp::cli {

namespace {

using json = nlohmann::ordered_json;

struct RunConfig {
  std::string command;
  std::optional<double> nu, alpha, theta;
  bool zero_truncated = false;
  std::optional<std::int64_t> m;
  std::uint64_t seed = 1;
  int replicates = 100;
  std::string format = "json";
  std::string data;
  double delta = 0.2;
  std::optional<double> u_min, u_max;
  double x0 = 0.2;
  bool estimate_rate = false;
  double threshold = kDefaultRegimeThreshold;
  std::optional<double> z_x;
  std::optional<std::int64_t> z_items;
  std::optional<int> fitted;
  double min_expected = 5.0;
  std::int64_t n = 10000;
  double x_lo = 0.3;
};

bool is_gigp_command(const std::string& c) { return c != "partition"; }

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
void read_opt(const json& j, const char* key, std::optional<T>& dst) {
  if (!j.contains(key) || j[key].is_null()) {
    dst.reset();
    return;
  }
  dst = j[key].get<T>();
}

template <class T>
void read_val(const json& j, const char* key, T& dst) {
  if (j.contains(key) && !j[key].is_null()) dst = j[key].get<T>();
}

// The resolved run configuration; the output path is deliberately absent so
// that re-running into another file reproduces the same bytes.
json config_to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  if (is_gigp_command(c.command)) {
    j["nu"] = opt(c.nu);
    j["alpha"] = opt(c.alpha);
    j["theta"] = opt(c.theta);
    j["zero_truncated"] = c.zero_truncated;
  }
  if (c.command == "simulate" || c.command == "chaotic" || (c.command == "shape" && c.data.empty())) {
    j["m"] = opt(c.m);
    j["seed"] = c.seed;
  }
  if (c.command == "shape" || c.command == "fit" || c.command == "gof") j["data"] = c.data.empty() ? json(nullptr) : json(c.data);
  if (c.command == "shape") j["delta"] = c.delta;
  if (c.command == "fit") {
    j["u_min"] = opt(c.u_min);
    j["u_max"] = opt(c.u_max);
  }
  if (c.command == "gof") {
    j["fitted"] = opt(c.fitted);
    j["min_expected"] = c.min_expected;
    j["z_x"] = opt(c.z_x);
    j["z_items"] = opt(c.z_items);
  }
  if (c.command == "chaotic") {
    j["x0"] = c.x0;
    j["replicates"] = c.replicates;
    j["estimate_rate"] = c.estimate_rate;
    j["min_expected"] = c.min_expected;
  }
  if (c.command == "partition") {
    j["n"] = c.n;
    j["seed"] = c.seed;
    j["x_lo"] = c.x_lo;
  }
  j["threshold"] = c.threshold;
  j["format"] = c.format;
  return j;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object() || !j.contains("command")) throw ValidationError("config: missing command");
  RunConfig c;
  c.command = j["command"].get<std::string>();
  read_opt(j, "nu", c.nu);
  read_opt(j, "alpha", c.alpha);
  read_opt(j, "theta", c.theta);
  read_val(j, "zero_truncated", c.zero_truncated);
  read_opt(j, "m", c.m);
  read_val(j, "seed", c.seed);
  read_val(j, "replicates", c.replicates);
  read_val(j, "format", c.format);
  read_val(j, "data", c.data);
  read_val(j, "delta", c.delta);
  read_opt(j, "u_min", c.u_min);
  read_opt(j, "u_max", c.u_max);
  read_val(j, "x0", c.x0);
  read_val(j, "estimate_rate", c.estimate_rate);
  read_val(j, "threshold", c.threshold);
  read_opt(j, "z_x", c.z_x);
  read_opt(j, "z_items", c.z_items);
  read_opt(j, "fitted", c.fitted);
  read_val(j, "min_expected", c.min_expected);
  read_val(j, "n", c.n);
  read_val(j, "x_lo", c.x_lo);
  return c;
}

void resolve(RunConfig& c) {
  if (c.format != "json" && c.format != "csv" && c.format != "svg") throw ValidationError("--format must be json, csv or svg");
  if (!(c.threshold > 0.0)) throw ValidationError("--threshold must be positive");
  if (is_gigp_command(c.command) && c.nu && c.alpha && *c.alpha == 0.0 && *c.nu <= 0.0) c.zero_truncated = true;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return ss.str();
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string xml_unescape(const std::string& s) {
  static const std::pair<const char*, char> entities[] = {
      {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}};
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    bool hit = false;
    if (s[i] == '&') {
      for (const auto& [name, ch] : entities) {
        const std::size_t len = std::char_traits<char>::length(name);
        if (s.compare(i, len, name) == 0) {
          out += ch;
          i += len;
          hit = true;
          break;
        }
      }
    }
    if (!hit) out += s[i++];
  }
  return out;
}

// Extracts the embedded configuration from a JSON report, a CSV series, an
// SVG plot or a bare configuration object.
json load_config(const std::string& path) {
  const std::string text = read_file(path);
  const std::string csv_tag = "# config: ";
  if (text.compare(0, csv_tag.size(), csv_tag) == 0) {
    const auto eol = text.find('\n');
    return json::parse(text.substr(csv_tag.size(), eol == std::string::npos ? std::string::npos : eol - csv_tag.size()));
  }
  const auto meta = text.find("<metadata>");
  if (meta != std::string::npos) {
    const auto start = meta + std::string("<metadata>").size();
    const auto end = text.find("</metadata>", start);
    if (end == std::string::npos) throw ValidationError("config: unterminated metadata in " + path);
    return json::parse(xml_unescape(text.substr(start, end - start)));
  }
  const json j = json::parse(text);
  if (j.is_object() && j.contains("config")) return j["config"];
  return j;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---- plotting --------------------------------------------------------------

struct Series {
  std::string name;
  std::string color;
  std::vector<std::pair<double, double>> pts;
  bool markers = false;
};

struct Pane {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
};

std::string render_svg(const std::vector<Pane>& panes, const json& config, const std::string& scaling_line) {
  const double pw = 440, ph = 320, ml = 60, mt = 40, gap = 40;
  const double width = ml + panes.size() * (pw + gap), height = mt + ph + 70;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<metadata>" << xml_escape(config.dump()) << "</metadata>\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << num(ml) << "\" y=\"16\">" << xml_escape(scaling_line) << "</text>\n";
  for (std::size_t p = 0; p < panes.size(); ++p) {
    const Pane& pane = panes[p];
    const double x0 = ml + p * (pw + gap), y0 = mt;
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& se : pane.series)
      for (const auto& [x, y] : se.pts) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    if (!(xmin < xmax)) {
      xmin = std::isfinite(xmin) ? xmin - 1 : 0;
      xmax = xmin + 2;
    }
    if (!(ymin < ymax)) {
      ymin = std::isfinite(ymin) ? ymin - 1 : 0;
      ymax = ymin + 2;
    }
    auto px = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return y0 + ph - (y - ymin) / (ymax - ymin) * ph; };
    s << "<g>\n<text x=\"" << num(x0) << "\" y=\"" << num(y0 - 8) << "\" font-weight=\"bold\">" << xml_escape(pane.title)
      << "</text>\n";
    s << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    s << "<text x=\"" << num(x0) << "\" y=\"" << num(y0 + ph + 14) << "\">" << num(xmin) << "</text>\n";
    s << "<text x=\"" << num(x0 + pw) << "\" y=\"" << num(y0 + ph + 14) << "\" text-anchor=\"end\">" << num(xmax)
      << "</text>\n";
    s << "<text x=\"" << num(x0 + pw / 2) << "\" y=\"" << num(y0 + ph + 28) << "\" text-anchor=\"middle\">"
      << xml_escape(pane.xlabel) << "</text>\n";
    s << "<text x=\"" << num(x0 - 4) << "\" y=\"" << num(y0 + ph) << "\" text-anchor=\"end\">" << num(ymin) << "</text>\n";
    s << "<text x=\"" << num(x0 - 4) << "\" y=\"" << num(y0 + 10) << "\" text-anchor=\"end\">" << num(ymax) << "</text>\n";
    s << "<text x=\"" << num(x0 - 44) << "\" y=\"" << num(y0 + ph / 2) << "\" transform=\"rotate(-90 " << num(x0 - 44) << ' '
      << num(y0 + ph / 2) << ")\" text-anchor=\"middle\">" << xml_escape(pane.ylabel) << "</text>\n";
    double ly = y0 + ph + 44;
    double lx = x0;
    for (const auto& se : pane.series) {
      if (se.markers) {
        for (const auto& [x, y] : se.pts) {
          if (!std::isfinite(x) || !std::isfinite(y)) continue;
          s << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"1.5\" fill=\"" << se.color << "\"/>\n";
        }
      } else {
        s << "<polyline fill=\"none\" stroke=\"" << se.color << "\" stroke-width=\"1.2\" points=\"";
        bool first = true;
        for (const auto& [x, y] : se.pts) {
          if (!std::isfinite(x) || !std::isfinite(y)) continue;
          s << (first ? "" : " ") << num(px(x)) << ',' << num(py(y));
          first = false;
        }
        s << "\"/>\n";
      }
      s << "<text x=\"" << num(lx) << "\" y=\"" << num(ly) << "\" fill=\"" << se.color << "\">" << xml_escape(se.name)
        << "</text>\n";
      lx += 150;
    }
    s << "</g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

// Step plot of the data, model Fbar and scaled-back limit shape, plus the
// tail plot in (log x, log y + x) coordinates.
std::vector<Pane> diagram_panes(const FrequencyTable& table, const GigpDistribution* dist, const ScalingPair& pair,
                                double nu) {
  const YoungBoundary y(table);
  const double M = static_cast<double>(table.M());
  Pane main{"Young diagram boundary", "items j", "log10 Y(j)", {}};
  Series data{"data Y(j)", "black", {}, false};
  double prev = 0.0;
  for (std::size_t i = 0; i < y.support().size(); ++i) {
    const double j = static_cast<double>(y.support()[i]);
    const double level = std::log10(static_cast<double>(y.value_at(i)));
    data.pts.emplace_back(prev, level);
    data.pts.emplace_back(j, level);
    prev = j;
  }
  main.series.push_back(data);
  const double jmax = static_cast<double>(std::max<std::int64_t>(table.max_value(), 1));
  const int steps = 400;
  if (dist) {
    Series model{"model M Fbar(j)", "#1f77b4", {}, false};
    for (int k = 0; k <= steps; ++k) {
      const double j = std::round(jmax * k / steps);
      const double v = M * dist->ccdf(j);
      if (v > 0.0) model.pts.emplace_back(j, std::log10(v));
    }
    main.series.push_back(model);
  }
  Series limit{"B phi(j/A)", "#d62728", {}, false};
  for (int k = 1; k <= steps; ++k) {
    const double j = jmax * k / steps;
    const double v = pair.B * upper_incomplete_gamma(nu, j / pair.A);
    if (v > 0.0) limit.pts.emplace_back(j, std::log10(v));
  }
  main.series.push_back(limit);

  Pane tail{"Tail coordinates", "u = log x", "v = log Y + x", {}};
  Series pts{"data", "black", {}, true};
  for (std::size_t i = 0; i < y.support().size(); ++i) {
    const std::int64_t j = y.support()[i];
    if (j < 1) continue;
    const double x = static_cast<double>(j) / pair.A;
    pts.pts.emplace_back(std::log(x), std::log(static_cast<double>(y.value_at(i))) + x);
  }
  tail.series.push_back(pts);
  if (!pts.pts.empty()) {
    const double u0 = pts.pts.front().first, u1 = pts.pts.back().first;
    Series line{"log B + (nu-1) u", "#d62728", {}, false};
    Series curve{"log(B phi(x)) + x", "#1f77b4", {}, false};
    for (int k = 0; k <= 100; ++k) {
      const double u = u0 + (u1 - u0) * k / 100.0;
      line.pts.emplace_back(u, std::log(pair.B) + (nu - 1.0) * u);
      const double x = std::exp(u);
      const double phi = upper_incomplete_gamma(nu, x);
      if (phi > 0.0) curve.pts.emplace_back(u, std::log(pair.B * phi) + x);
    }
    tail.series.push_back(line);
    tail.series.push_back(curve);
  }
  return {main, tail};
}

// ---- commands --------------------------------------------------------------

struct Report {
  json scaling;
  json result;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  std::vector<Pane> panes;
};

double need(const std::optional<double>& v, const char* flag) {
  if (!v) throw ValidationError(std::string("missing required flag ") + flag);
  return *v;
}

std::int64_t need_m(const std::optional<std::int64_t>& m) {
  if (!m) throw ValidationError("missing required flag --m");
  if (*m <= 0) throw ValidationError("--m must be positive");
  return *m;
}

json scaling_json(const ScalingPair& pair, double threshold, const char* label = nullptr) {
  json j;
  j["A"] = pair.A;
  j["B"] = pair.B;
  j["case"] = label ? std::string(label) : std::string(1, case_letter(pair.label));
  j["regime"] = regime_name(classify_regime(pair, threshold));
  j["threshold"] = threshold;
  return j;
}

// Data table and model parameters for data-driven commands; theta is
// estimated from the sample mean when not given.
struct Fitted {
  FrequencyTable table;
  GigpParams params;
  bool theta_estimated = false;
};

Fitted load_and_fit(const RunConfig& c) {
  if (c.data.empty()) throw ValidationError("missing required flag --data");
  Fitted f;
  f.table = read_table_csv(c.data);
  if (f.table.M() == 0) throw InsufficientDataError("data table is empty");
  const double nu = need(c.nu, "--nu"), alpha = need(c.alpha, "--alpha");
  double theta;
  if (c.theta) {
    theta = *c.theta;
  } else {
    theta = estimate_theta(nu, alpha, f.table, c.zero_truncated);
    f.theta_estimated = true;
  }
  f.params = validate({nu, alpha, theta, c.zero_truncated});
  return f;
}

GigpParams model_params(const RunConfig& c) {
  return validate({need(c.nu, "--nu"), need(c.alpha, "--alpha"), need(c.theta, "--theta"), c.zero_truncated});
}

void add_theta(json& r, const GigpParams& p, bool estimated) {
  r["theta"] = p.theta;
  r["theta_source"] = estimated ? "mean-matched" : "given";
}

json chi2_json(const GofReport& g, int n_fitted, double min_expected, std::int64_t j0, bool open_last) {
  json bins = json::array();
  for (std::size_t i = 0; i < g.bins.size(); ++i) {
    const auto& b = g.bins[i];
    json e;
    e["first"] = j0 + b.first;
    e["last"] = (open_last && i + 1 == g.bins.size()) ? json(nullptr) : json(j0 + b.last);
    e["observed"] = b.observed;
    e["expected"] = b.expected;
    bins.push_back(e);
  }
  json j;
  j["statistic"] = g.statistic;
  j["df"] = g.df;
  j["p_value"] = g.p_value;
  j["n_fitted"] = n_fitted;
  j["min_expected"] = min_expected;
  j["bins"] = bins;
  return j;
}

void chi2_csv(Report& rep, const GofReport& g, std::int64_t j0, bool open_last) {
  rep.csv_header = {"first", "last", "observed", "expected"};
  for (std::size_t i = 0; i < g.bins.size(); ++i) {
    const auto& b = g.bins[i];
    const bool open = open_last && i + 1 == g.bins.size();
    rep.csv_rows.push_back({std::to_string(j0 + b.first), open ? std::string() : std::to_string(j0 + b.last),
                            num(b.observed), num(b.expected)});
  }
}

json table_json(const FrequencyTable& t) {
  json rows = json::array();
  for (const auto& e : t.entries()) rows.push_back({e.j, e.count});
  return rows;
}

Report cmd_simulate(const RunConfig& c) {
  const GigpParams p = model_params(c);
  const std::int64_t M = need_m(c.m);
  const GigpDistribution dist(p);
  const FrequencyTable t = dist.sample(c.seed, M);
  const ScalingPair pair = scaling_b(p, M);
  Report rep;
  rep.scaling = scaling_json(pair, c.threshold);
  rep.result["M"] = t.M();
  rep.result["N"] = t.N();
  rep.result["mean_model"] = dist.mean();
  rep.result["table"] = table_json(t);
  rep.csv_header = {"j", "count"};
  for (const auto& e : t.entries()) rep.csv_rows.push_back({std::to_string(e.j), std::to_string(e.count)});
  rep.panes = diagram_panes(t, &dist, pair, p.nu);
  return rep;
}

Report cmd_shape(const RunConfig& c) {
  FrequencyTable table;
  GigpParams p;
  bool estimated = false;
  if (!c.data.empty()) {
    Fitted f = load_and_fit(c);
    table = std::move(f.table);
    p = f.params;
    estimated = f.theta_estimated;
  } else {
    p = model_params(c);
    table = GigpDistribution(p).sample(c.seed, need_m(c.m));
  }
  const GigpDistribution dist(p);
  const ScalingPair pair = scaling_b(p, table.M());
  const ShapeReport sr = sup_distance(table, pair, dist, c.delta);
  Report rep;
  rep.scaling = scaling_json(pair, c.threshold);
  rep.result["M"] = table.M();
  rep.result["N"] = table.N();
  add_theta(rep.result, p, estimated);
  rep.result["delta"] = sr.delta;
  rep.result["sup_distance"] = sr.sup_distance;
  rep.result["sup_at"] = sr.sup_at;
  rep.result["max_mse"] = sr.max_mse ? jnum(*sr.max_mse) : json(nullptr);
  json pts = json::array();
  rep.csv_header = {"x", "y_scaled", "phi", "upsilon", "mse"};
  for (const auto& pt : sr.pointwise) {
    json e;
    e["x"] = pt.x;
    e["y_scaled"] = pt.y_scaled;
    e["phi"] = pt.phi;
    e["upsilon"] = pt.upsilon ? jnum(*pt.upsilon) : json(nullptr);
    e["mse"] = pt.mse ? jnum(*pt.mse) : json(nullptr);
    pts.push_back(e);
    rep.csv_rows.push_back({num(pt.x), num(pt.y_scaled), num(pt.phi), pt.upsilon ? num(*pt.upsilon) : std::string(),
                            pt.mse ? num(*pt.mse) : std::string()});
  }
  rep.result["points"] = pts;
  rep.panes = diagram_panes(table, &dist, pair, p.nu);
  return rep;
}

Report cmd_fit(const RunConfig& c) {
  const Fitted f = load_and_fit(c);
  const GigpParams& p = f.params;
  const ScalingPair pair = scaling_b(p, f.table.M());
  const TailFit tf = fit_tail_line(f.table, pair.A, c.u_min, c.u_max);
  const auto alpha_hat = alpha_from_b(p.nu, p.theta, f.table.M(), std::exp(tf.logB_hat));
  Report rep;
  rep.scaling = scaling_json(pair, c.threshold);
  rep.result["M"] = f.table.M();
  rep.result["N"] = f.table.N();
  add_theta(rep.result, p, f.theta_estimated);
  json t;
  t["slope"] = tf.slope;
  t["intercept"] = tf.intercept;
  t["nu_hat"] = tf.nu_hat;
  t["logB_hat"] = tf.logB_hat;
  t["B_hat"] = std::exp(tf.logB_hat);
  t["r_squared"] = tf.r_squared;
  t["u_min"] = tf.u_min;
  t["u_max"] = tf.u_max;
  t["points"] = tf.points;
  rep.result["tail_fit"] = t;
  rep.result["alpha_hat"] = alpha_hat ? json(*alpha_hat) : json(nullptr);
  rep.csv_header = {"u", "v", "in_window", "fitted"};
  const YoungBoundary y(f.table);
  for (std::size_t i = 0; i < y.support().size(); ++i) {
    const std::int64_t j = y.support()[i];
    if (j < 1) continue;
    const double x = static_cast<double>(j) / pair.A;
    const double u = std::log(x), v = std::log(static_cast<double>(y.value_at(i))) + x;
    const bool in = u >= tf.u_min && u <= tf.u_max;
    rep.csv_rows.push_back({num(u), num(v), in ? "1" : "0", num(tf.intercept + tf.slope * u)});
  }
  const GigpDistribution dist(p);
  rep.panes = diagram_panes(f.table, &dist, pair, p.nu);
  return rep;
}

Report cmd_gof(const RunConfig& c) {
  const Fitted f = load_and_fit(c);
  const GigpParams& p = f.params;
  const GigpDistribution dist(p);
  const std::int64_t M = f.table.M();
  const ScalingPair pair = scaling_b(p, M);
  const std::int64_t j0 = dist.min_support();
  const std::int64_t K = std::max(f.table.max_value(), j0 + 1);
  const double md = static_cast<double>(M);
  std::vector<double> observed, expected;
  for (std::int64_t j = j0; j < K; ++j) {
    observed.push_back(static_cast<double>(f.table.count(j)));
    expected.push_back(md * dist.pmf(j));
  }
  double above = 0.0;
  for (const auto& e : f.table.entries())
    if (e.j >= K) above += static_cast<double>(e.count);
  observed.push_back(above);
  expected.push_back(std::max(md * dist.ccdf(static_cast<double>(K)), std::numeric_limits<double>::min()));
  const int n_fitted = c.fitted ? *c.fitted : (f.theta_estimated ? 1 : 0);
  const GofReport g = pearson_chi2(observed, expected, n_fitted, c.min_expected);

  Report rep;
  rep.scaling = scaling_json(pair, c.threshold);
  rep.result["M"] = M;
  rep.result["N"] = f.table.N();
  add_theta(rep.result, p, f.theta_estimated);
  rep.result["chi2"] = chi2_json(g, n_fitted, c.min_expected, j0, true);
  if (c.z_x && c.z_items) throw ValidationError("--z-x and --z-items are mutually exclusive");
  if (c.z_x || c.z_items) {
    const double x = c.z_x ? *c.z_x : static_cast<double>(*c.z_items) / pair.A;
    const ZTest z = pointwise_z_test(f.table, dist, M, pair, x, c.threshold);
    json zj;
    zj["x"] = x;
    zj["items"] = to_items(pair.A, x);
    zj["z"] = z.z;
    zj["two_sided_p"] = z.two_sided_p;
    zj["one_sided_p"] = z.one_sided_p;
    zj["regime_warning"] = z.regime_warning;
    rep.result["z_test"] = zj;
  } else {
    rep.result["z_test"] = nullptr;
  }
  chi2_csv(rep, g, j0, true);
  rep.panes = diagram_panes(f.table, &dist, pair, p.nu);
  return rep;
}

Report cmd_chaotic(const RunConfig& c) {
  const GigpParams p = model_params(c);
  const std::int64_t M = need_m(c.m);
  const PoissonExperiment e = poisson_gof_experiment(p, M, c.x0, c.replicates, c.seed,
                                                     c.estimate_rate ? RateMode::estimated : RateMode::specified,
                                                     c.threshold, c.min_expected);
  Report rep;
  rep.scaling = scaling_json(e.pair, c.threshold);
  rep.result["x0"] = c.x0;
  rep.result["items"] = to_items(e.pair.A, c.x0);
  rep.result["model_lambda"] = e.model_lambda;
  rep.result["tv_bound"] = e.model_lambda * e.model_lambda / static_cast<double>(M);
  rep.result["rate_mode"] = c.estimate_rate ? "estimated" : "specified";
  rep.result["lambda"] = e.lambda;
  rep.result["replicate_mean"] = e.replicate_mean;
  rep.result["replicate_variance"] = e.replicate_variance;
  rep.result["regime_warning"] = e.regime_warning;
  rep.result["chi2"] = chi2_json(e.gof, c.estimate_rate ? 1 : 0, c.min_expected, 0, true);
  rep.result["y_values"] = e.y_values;
  chi2_csv(rep, e.gof, 0, true);
  Pane hist{"Y(A x0) over replicates", "cell", "count", {}};
  Series obs{"observed", "black", {}, true}, exp{"expected", "#d62728", {}, false};
  for (std::size_t i = 0; i < e.gof.bins.size(); ++i) {
    obs.pts.emplace_back(static_cast<double>(i), e.gof.bins[i].observed);
    exp.pts.emplace_back(static_cast<double>(i), e.gof.bins[i].expected);
  }
  hist.series = {obs, exp};
  rep.panes = {hist};
  return rep;
}

Report cmd_partition(const RunConfig& c) {
  const PartitionConfig pc = calibrate(c.n);
  const FrequencyTable t = sample_partition(pc, c.seed);
  const double s = std::sqrt(static_cast<double>(c.n));
  const ScalingPair pair{s, s, ScalingCase::a};
  Report rep;
  rep.scaling = scaling_json(pair, c.threshold, "partition");
  rep.result["n"] = c.n;
  rep.result["z"] = pc.z;
  rep.result["kappa"] = pc.kappa;
  rep.result["j_cutoff"] = pc.j_cutoff;
  rep.result["M"] = t.M();
  rep.result["N"] = t.N();
  rep.result["expected_parts"] = expected_parts(pc);
  rep.result["asymptotic_parts"] = asymptotic_parts(c.n);
  rep.result["expected_weight"] = expected_weight(pc);
  rep.result["x_lo"] = c.x_lo;
  rep.result["sup_distance"] = partition_sup_distance(t, c.n, c.x_lo);
  rep.csv_header = {"x", "y_scaled", "shape"};
  const YoungBoundary y(t);
  Pane pane{"Scaled partition diagram", "x = j / sqrt(n)", "y = Y / sqrt(n)", {}};
  Series data{"data", "black", {}, false}, shape{"limit shape", "#d62728", {}, false};
  double prev = 0.0;
  for (std::size_t i = 0; i < y.support().size(); ++i) {
    const double x = static_cast<double>(y.support()[i]) / s;
    const double v = static_cast<double>(y.value_at(i)) / s;
    rep.csv_rows.push_back({num(x), num(v), num(partition_shape(x))});
    data.pts.emplace_back(prev, v);
    data.pts.emplace_back(x, v);
    prev = x;
  }
  const double xmax = std::max(prev, 1.0);
  for (int k = 1; k <= 400; ++k) {
    const double x = std::max(c.x_lo, xmax * k / 400.0);
    shape.pts.emplace_back(x, partition_shape(x));
  }
  pane.series = {data, shape};
  rep.panes = {pane};
  return rep;
}

Report execute(const RunConfig& c) {
  if (c.command == "simulate") return cmd_simulate(c);
  if (c.command == "shape") return cmd_shape(c);
  if (c.command == "fit") return cmd_fit(c);
  if (c.command == "gof") return cmd_gof(c);
  if (c.command == "chaotic") return cmd_chaotic(c);
  if (c.command == "partition") return cmd_partition(c);
  throw ValidationError("unknown command " + c.command);
}

std::string scaling_line(const json& s) {
  return "A=" + num(s["A"].get<double>()) + ",B=" + num(s["B"].get<double>()) + ",case=" + s["case"].get<std::string>() +
         ",regime=" + s["regime"].get<std::string>();
}

std::string render(const RunConfig& c, const Report& rep) {
  const json config = config_to_json(c);
  if (c.format == "json") {
    json doc;
    doc["config"] = config;
    doc["scaling"] = rep.scaling;
    doc["result"] = rep.result;
    return doc.dump(2) + "\n";
  }
  if (c.format == "csv") {
    std::ostringstream s;
    s << "# config: " << config.dump() << "\n# scaling: " << scaling_line(rep.scaling) << "\n";
    for (std::size_t i = 0; i < rep.csv_header.size(); ++i) s << (i ? "," : "") << rep.csv_header[i];
    s << "\n";
    for (const auto& row : rep.csv_rows) {
      for (std::size_t i = 0; i < row.size(); ++i) s << (i ? "," : "") << row[i];
      s << "\n";
    }
    return s.str();
  }
  return render_svg(rep.panes, config, scaling_line(rep.scaling));
}

std::string output_path(const RunConfig& c, const std::string& out_flag) {
  const char* dir = std::getenv("GIGP_OUTPUT_DIR");
  if (out_flag.empty()) {
    if (!dir || !*dir) return {};
    return (std::filesystem::path(dir) / (c.command + "." + c.format)).string();
  }
  std::filesystem::path p(out_flag);
  if (p.is_relative() && dir && *dir) p = std::filesystem::path(dir) / p;
  return p.string();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing " + path);
}

// Flag values collected by CLI11 before they are copied into a RunConfig.
struct Flags {
  double nu = 0, alpha = 0, theta = 0, u_min = 0, u_max = 0, z_x = 0;
  std::int64_t m = 0, z_items = 0;
  int fitted = 0;
  std::string out, config;
};

void add_model_flags(CLI::App* sc, Flags& f, RunConfig& c) {
  sc->add_option("--nu", f.nu, "shape parameter nu (>= -1)");
  sc->add_option("--alpha", f.alpha, "parameter alpha (>= 0)");
  sc->add_option("--theta", f.theta, "parameter theta in (0, 1)");
  sc->add_flag("--truncated", c.zero_truncated, "condition on at least one item (implied for alpha = 0, nu <= 0)");
}

void add_common_flags(CLI::App* sc, Flags& f, RunConfig& c) {
  sc->add_option("--format", c.format, "output format: json, csv or svg");
  sc->add_option("--out", f.out, "output file (default: stdout or $GIGP_OUTPUT_DIR)");
  sc->add_option("--config", f.config, "re-run from the configuration embedded in a previous output");
  sc->add_option("--threshold", c.threshold, "B at or above which the regime is regular");
}

bool given(const CLI::App* sc, const std::string& name) {
  const CLI::Option* o = sc->get_option_no_throw(name);
  return o && o->count() > 0;
}

}  // namespace

FrequencyTable parse_table_csv(const std::string& text) {
  if (text.find('\r') != std::string::npos) throw ValidationError("table CSV must use LF line endings");
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<FrequencyTable::Entry> entries;
  std::vector<std::int64_t> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (!header) {
      if (!line.empty() && line[0] == '#') continue;
      if (line != "j,count") throw ValidationError("table CSV: expected header 'j,count' at line " + std::to_string(lineno));
      header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw ValidationError("table CSV: expected two columns at line " + std::to_string(lineno));
    auto parse = [&](std::string_view field) {
      std::int64_t v = 0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size())
        throw ValidationError("table CSV: non-integer field at line " + std::to_string(lineno));
      return v;
    };
    const std::string_view sv(line);
    const std::int64_t j = parse(sv.substr(0, comma));
    const std::int64_t count = parse(sv.substr(comma + 1));
    if (std::find(seen.begin(), seen.end(), j) != seen.end())
      throw ValidationError("table CSV: duplicate j at line " + std::to_string(lineno));
    seen.push_back(j);
    entries.push_back({j, count});
  }
  if (!header) throw ValidationError("table CSV: missing header 'j,count'");
  return FrequencyTable(std::move(entries));
}

FrequencyTable read_table_csv(const std::string& path) { return parse_table_csv(read_file(path)); }

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"GIGP count-data model: simulation, limit shapes, fitting and goodness of fit"};
  app.require_subcommand(1);
  Flags f;
  RunConfig c;

  auto* sim = app.add_subcommand("simulate", "sample a frequency table from the model");
  add_model_flags(sim, f, c);
  sim->add_option("--m", f.m, "number of sources M");
  sim->add_option("--seed", c.seed, "random seed");
  add_common_flags(sim, f, c);

  auto* shape = app.add_subcommand("shape", "sup distance of the scaled diagram to the limit shape");
  add_model_flags(shape, f, c);
  shape->add_option("--data", c.data, "frequency table CSV (otherwise simulate)");
  shape->add_option("--m", f.m, "number of sources M when simulating");
  shape->add_option("--seed", c.seed, "random seed when simulating");
  shape->add_option("--delta", c.delta, "lower end of the x range");
  add_common_flags(shape, f, c);

  auto* fit = app.add_subcommand("fit", "tail-line fit; theta by mean matching unless given");
  add_model_flags(fit, f, c);
  fit->add_option("--data", c.data, "frequency table CSV");
  fit->add_option("--u-min", f.u_min, "fit window lower end in u = log x");
  fit->add_option("--u-max", f.u_max, "fit window upper end in u = log x");
  add_common_flags(fit, f, c);

  auto* gof = app.add_subcommand("gof", "Pearson chi-square and pointwise z test against a data table");
  add_model_flags(gof, f, c);
  gof->add_option("--data", c.data, "frequency table CSV");
  gof->add_option("--fitted", f.fitted, "number of fitted parameters (default 1 if theta is estimated, else 0)");
  gof->add_option("--min-expected", c.min_expected, "merge cells below this expected count");
  gof->add_option("--z-x", f.z_x, "z test at scaled position x");
  gof->add_option("--z-items", f.z_items, "z test at x = items / A");
  add_common_flags(gof, f, c);

  auto* chaotic = app.add_subcommand("chaotic", "Poisson approximation experiment for bounded B");
  add_model_flags(chaotic, f, c);
  chaotic->add_option("--m", f.m, "number of sources M");
  chaotic->add_option("--seed", c.seed, "base seed; replicate r uses seed + r");
  chaotic->add_option("--x0", c.x0, "scaled position x0");
  chaotic->add_option("--replicates", c.replicates, "number of simulated tables");
  chaotic->add_flag("--estimate-rate", c.estimate_rate, "use the replicate mean as the Poisson rate");
  chaotic->add_option("--min-expected", c.min_expected, "merge cells below this expected count");
  add_common_flags(chaotic, f, c);

  auto* part = app.add_subcommand("partition", "Boltzmann random partition and its limit shape");
  part->add_option("--n", c.n, "target weight n");
  part->add_option("--seed", c.seed, "random seed");
  part->add_option("--x-lo", c.x_lo, "lower end of the sup-distance range");
  add_common_flags(part, f, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    CLI::App* sc = app.get_subcommands().front();
    c.command = sc->get_name();
    if (!f.config.empty()) {
      for (const CLI::Option* o : sc->get_options()) {
        if (o->count() == 0) continue;
        const std::string name = o->get_name();
        if (name != "--config" && name != "--out")
          throw ValidationError("--config cannot be combined with " + name);
      }
      RunConfig loaded = config_from_json(load_config(f.config));
      if (loaded.command != c.command)
        throw ValidationError("configuration is for command '" + loaded.command + "', not '" + c.command + "'");
      c = std::move(loaded);
    } else {
      if (given(sc, "--nu")) c.nu = f.nu;
      if (given(sc, "--alpha")) c.alpha = f.alpha;
      if (given(sc, "--theta")) c.theta = f.theta;
      if (given(sc, "--m")) c.m = f.m;
      if (given(sc, "--u-min")) c.u_min = f.u_min;
      if (given(sc, "--u-max")) c.u_max = f.u_max;
      if (given(sc, "--z-x")) c.z_x = f.z_x;
      if (given(sc, "--z-items")) c.z_items = f.z_items;
      if (given(sc, "--fitted")) c.fitted = f.fitted;
    }
    resolve(c);
    const Report rep = execute(c);
    write_output(output_path(c, f.out), render(c, rep), out);
    return kExitOk;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace gigp::cli
