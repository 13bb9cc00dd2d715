#include "nnjump/cli/outputs.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "nnjump/error.hpp"

namespace nnjump::cli {

namespace {

using json = nlohmann::ordered_json;

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(g17(v)); }

json config_json(const Scenario& s) {
  const auto& c = s.config;
  json j;
  j["dt"] = c.dt_max;
  j["horizon"] = c.horizon;
  j["paths"] = c.n_paths;
  j["eps"] = c.eps;
  j["m_cap"] = c.m_cap;
  j["cap_policy"] = c.cap_policy == CapPolicy::Extend ? "extend" : "stop";
  j["max_doublings"] = c.max_doublings;
  j["exact_stable"] = c.exact_stable;
  j["x0"] = s.x0;
  return j;
}

}  // namespace

Summary make_summary(const Scenario& s, const EnsembleResult& r, double trunc_budget, std::optional<double> K) {
  Summary out;
  out.model = s.model.name;
  out.scenario = s;
  out.seed = s.config.root_seed;
  out.x0 = s.x0;
  for (const auto& ts : r.stats) {
    out.t_grid.push_back(ts.t);
    out.mean.push_back(ts.mean);
    out.var.push_back(ts.var);
    out.se.push_back(ts.se);
  }
  out.clamp_count = r.clamp_count;
  out.cap_events = r.cap_events;
  out.truncation_variance_budget = trunc_budget;
  out.K = K;
  return out;
}

std::string summary_json(const Summary& s) {
  json j;
  j["model"] = {{"name", s.model}, {"form", form_name(s.scenario.model.form)}};
  j["config"] = config_json(s.scenario);
  j["seed"] = s.seed;
  j["t_grid"] = s.t_grid;
  j["mean"] = s.mean;
  j["var"] = s.var;
  j["se"] = s.se;
  j["clamp_count"] = s.clamp_count;
  j["cap_events"] = s.cap_events;
  j["truncation_variance_budget"] = s.truncation_variance_budget;
  if (s.K) j["linear_growth_K"] = *s.K;
  return j.dump(2) + "\n";
}

namespace {

json report_obj(const ConditionReport& r) {
  json j;
  j["condition_id"] = r.condition_id;
  j["verdict"] = to_string(r.verdict);
  json c = json::object();
  for (const auto& [k, v] : r.constants) c[k] = num(v);
  j["constants"] = c;
  if (r.modulus_fit) {
    const auto& f = *r.modulus_fit;
    json table = json::array();
    for (const auto& [d, m] : f.table) table.push_back({num(d), num(m)});
    j["modulus_fit"] = {{"family", f.family}, {"gamma", num(f.gamma)}, {"C", num(f.coef)},
                        {"r_squared", num(f.r_squared)}, {"table", table}};
  }
  json w = json::array();
  for (const auto& x : r.witnesses) w.push_back({{"x", num(x.x)}, {"y", num(x.y)}, {"z", num(x.z)}, {"value", num(x.value)}});
  j["witnesses"] = w;
  if (!r.table.empty()) {
    json t = json::array();
    for (const auto& [x, v] : r.table) t.push_back({num(x), num(v)});
    j["table"] = t;
  }
  if (!r.envelope.empty()) {
    json t = json::array();
    for (const auto& [x, v] : r.envelope) t.push_back({num(x), num(v)});
    j["envelope"] = t;
  }
  j["note"] = r.note;
  return j;
}

}  // namespace

std::string report_json(const ConditionReport& r) { return report_obj(r).dump(2) + "\n"; }

std::string reports_json(std::span<const ConditionReport> rs) {
  json a = json::array();
  bool all = true;
  for (const auto& r : rs) {
    a.push_back(report_obj(r));
    all = all && r.verdict == Verdict::Pass;
  }
  json j;
  j["reports"] = a;
  j["all_pass"] = all;
  return j.dump(2) + "\n";
}

std::string diagnostics_json(std::span<const DiagnosticsReport> rs) {
  json a = json::array();
  bool all = true;
  for (const auto& r : rs) {
    json j;
    j["kind"] = to_string(r.kind);
    j["statistic"] = num(r.statistic);
    j["band"] = {num(r.band_lo), num(r.band_hi)};
    j["verdict"] = to_string(r.verdict);
    json m = json::object();
    for (const auto& [k, v] : r.metadata) m[k] = v;
    j["metadata"] = m;
    json rows = json::array();
    for (const auto& row : r.rows) {
      json jr = json::array();
      for (double v : row) jr.push_back(num(v));
      rows.push_back(jr);
    }
    j["rows"] = rows;
    j["note"] = r.note;
    a.push_back(j);
    all = all && r.verdict == Verdict::Pass;
  }
  json j;
  j["reports"] = a;
  j["all_pass"] = all;
  return j.dump(2) + "\n";
}

std::string manifest_json(const std::string& digest, std::uint64_t seed, std::span<const ManifestEntry> entries) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  json j;
  j["scenario_digest"] = digest;
  j["root_seed"] = seed;
  j["version"] = kToolVersion;
  j["wall_clock"] = buf;
  json e = json::array();
  for (const auto& x : entries) e.push_back({{"command", x.command}, {"exit_status", x.exit_status}});
  j["commands"] = e;
  return j.dump(2) + "\n";
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    fail(ErrorKind::Io, "sha256 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string paths_csv(std::span<const SimPath> paths, const Dynamics& d) {
  std::string out = "path_id,time,state,event_channel,event_size\n";
  for (const auto& p : paths) {
    std::size_t j = 0;
    for (std::size_t i = 0; i < p.times.size(); ++i) {
      out += std::to_string(p.path_id) + "," + g17(p.times[i]) + "," + g17(p.states[i]) + ",";
      while (j < p.jumps.size() && p.jumps[j].event.time < p.times[i]) ++j;
      if (j < p.jumps.size() && p.jumps[j].event.time == p.times[i]) {
        const auto& aj = p.jumps[j];
        out += d.channels.at(aj.channel).name + "," + g17(aj.post - aj.pre);
        ++j;
      } else {
        out += ",";
      }
      out += "\n";
    }
  }
  return out;
}

std::string plot_svg(const Summary& s) {
  if (s.t_grid.empty()) fail(ErrorKind::Io, "plot: summary has an empty t_grid");
  const double W = 640, H = 400, L = 60, R = 20, T = 30, B = 50;
  const std::size_t n = s.t_grid.size();
  double tmin = std::min(0.0, s.t_grid.front()), tmax = s.t_grid.back();
  if (!(tmax > tmin)) tmax = tmin + 1.0;
  double ymin = s.x0, ymax = s.x0;
  for (std::size_t i = 0; i < n; ++i) {
    ymin = std::min(ymin, s.mean[i] - 3.0 * s.se[i]);
    ymax = std::max(ymax, s.mean[i] + 3.0 * s.se[i]);
  }
  auto bound = [&](double t) { return (1.0 + s.x0) * std::exp(*s.K * t) - 1.0; };
  if (s.K) ymax = std::max(ymax, bound(tmax));
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto X = [&](double t) { return L + (W - L - R) * (t - tmin) / (tmax - tmin); };
  auto Y = [&](double y) { return H - B - (H - T - B) * (y - ymin) / (ymax - ymin); };
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << " " << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << L << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << s.model
    << ": E[x(t)] with 3 SE band</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double t = tmin + (tmax - tmin) * k / 4.0;
    const double y = ymin + (ymax - ymin) * k / 4.0;
    o << "<text x=\"" << X(t) << "\" y=\"" << H - B + 18 << "\" font-size=\"11\" text-anchor=\"middle\">" << g6(t)
      << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << Y(y) + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << g6(y)
      << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" font-size=\"12\" text-anchor=\"middle\">t</text>\n";
  // band
  o << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.6\" points=\"";
  for (std::size_t i = 0; i < n; ++i) o << X(s.t_grid[i]) << "," << Y(s.mean[i] + 3.0 * s.se[i]) << " ";
  for (std::size_t i = n; i-- > 0;) o << X(s.t_grid[i]) << "," << Y(s.mean[i] - 3.0 * s.se[i]) << " ";
  o << "\"/>\n";
  o << "<polyline fill=\"none\" stroke=\"#08519c\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < n; ++i) o << X(s.t_grid[i]) << "," << Y(s.mean[i]) << " ";
  o << "\"/>\n";
  for (std::size_t i = 0; i < n; ++i) {
    o << "<circle cx=\"" << X(s.t_grid[i]) << "\" cy=\"" << Y(s.mean[i]) << "\" r=\"3\" fill=\"#08519c\"/>\n";
  }
  if (s.K) {
    o << "<polyline fill=\"none\" stroke=\"#cb181d\" stroke-dasharray=\"6,4\" points=\"";
    for (int k = 0; k <= 100; ++k) {
      const double t = tmin + (tmax - tmin) * k / 100.0;
      o << X(t) << "," << Y(bound(t)) << " ";
    }
    o << "\"/>\n";
    o << "<text x=\"" << W - R << "\" y=\"" << T + 14 << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#cb181d\">"
      << "bound (1+x0)e^{Kt} - 1, K=" << g6(*s.K) << "; (1+x0)e^{Kt} = " << g6(1.0 + bound(tmax)) << " at t="
      << g6(tmax) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out << content;
  if (!out) fail(ErrorKind::Io, "write failed for '" + path + "'");
}

}  // namespace nnjump::cli
