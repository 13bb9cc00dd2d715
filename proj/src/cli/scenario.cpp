#include "nnjump/cli/scenario.hpp"

#include <fstream>
#include <sstream>

#include "nnjump/error.hpp"

namespace nnjump::cli {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void bad(const std::string& key, const std::string& what) { fail(ErrorKind::Config, key + ": " + what); }

const Value& field(const Record& r, const std::string& name, const std::string& key) {
  const Value* v = find(r, name);
  if (!v) bad(key, "missing field '" + name + "'");
  return *v;
}

void only_fields(const Record& r, std::initializer_list<const char*> allowed, const std::string& key) {
  for (const auto& [k, v] : r) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) bad(key, "unknown field '" + k + "'");
  }
}

double num_field(const Record& r, const std::string& name, const std::string& key) {
  return field(r, name, key).as_double(key + "." + name);
}

Value pairs_to_value(const std::vector<std::pair<double, double>>& pts) {
  Array a;
  for (const auto& [x, y] : pts) a.push_back(Value{Array{Value::number(x), Value::number(y)}});
  return Value{a};
}

std::vector<std::pair<double, double>> pairs_from_value(const Value& v, const std::string& key) {
  std::vector<std::pair<double, double>> out;
  for (const auto& e : v.as_array(key)) {
    const auto& p = e.as_array(key);
    if (p.size() != 2) bad(key, "points must be [x, y] pairs");
    out.emplace_back(p[0].as_double(key), p[1].as_double(key));
  }
  return out;
}

Value doubles_to_value(const std::vector<double>& v) {
  Array a;
  for (double d : v) a.push_back(Value::number(d));
  return Value{a};
}

std::vector<double> doubles_from_value(const Value& v, const std::string& key) {
  std::vector<double> out;
  for (const auto& e : v.as_array(key)) out.push_back(e.as_double(key));
  return out;
}

Value strings_to_value(const std::vector<std::string>& v) {
  Array a;
  for (const auto& s : v) a.push_back(Value::string(s));
  return Value{a};
}

std::vector<std::string> strings_from_value(const Value& v, const std::string& key) {
  std::vector<std::string> out;
  for (const auto& e : v.as_array(key)) out.push_back(e.as_string(key));
  return out;
}

Value role_value(MeasureRole r) {
  return Value::string(r == MeasureRole::Compensated ? "compensated" : "raw");
}

std::optional<JumpMeasure> opt_measure(const Value& v, const std::string& key, MeasureRole role) {
  if (v.is_string() && v.as_string(key) == "none") return std::nullopt;
  return measure_from_value(v, key, role);
}

Value opt_measure_value(const std::optional<JumpMeasure>& m) {
  return m ? measure_to_value(*m) : Value::string("none");
}

Value kernel_to_value(const RateKernel& k) {
  return Value{Record{{"factor", fn_to_value(k.x_factor)}, {"threshold", Value::number(k.z_threshold)}}};
}

RateKernel kernel_from_value(const Value& v, const std::string& key) {
  if (v.is_number()) return RateKernel::constant(v.as_double(key));
  const Record& r = v.as_record(key);
  only_fields(r, {"factor", "threshold"}, key);
  RateKernel k;
  k.x_factor = fn_from_value(field(r, "factor", key), key + ".factor");
  if (const Value* t = find(r, "threshold")) k.z_threshold = t->as_double(key + ".threshold");
  if (!(k.z_threshold >= 0.0)) bad(key, "threshold must be >= 0");
  return k;
}

ModelForm default_form(const std::string& name, const std::string& key) {
  if (name == "general") return GeneralJump{};
  if (name == "cbi") return CBI{};
  if (name == "stable_cbi") return StableCBI{};
  if (name == "levy") return LevyDriven{};
  if (name == "cbie") return CBIE{};
  bad(key, "unknown form '" + name + "'");
}

void apply_model_key(ModelSpec& m, const std::string& f, const Value& v, const std::string& key) {
  const auto comp = MeasureRole::Compensated;
  const auto raw = MeasureRole::NonCompensated;
  if (f == "name") {
    m.name = v.as_string(key);
    return;
  }
  if (f == "h0_monotone") {
    m.h0_monotone = v.as_bool(key);
    return;
  }
  if (f == "h1_monotone") {
    m.h1_monotone = v.as_bool(key);
    return;
  }
  if (f == "b2") {
    if (v.is_string() && v.as_string(key) == "none") {
      m.drift_b2.reset();
    } else {
      m.drift_b2 = fn_from_value(v, key);
    }
    return;
  }
  auto stable_field = [&](StableCBI& s) {
    if (f == "a") s.a = v.as_double(key);
    else if (f == "b") s.b = v.as_double(key);
    else if (f == "beta") s.beta = v.as_double(key);
    else if (f == "c") s.c = v.as_double(key);
    else if (f == "alpha") s.alpha = v.as_double(key);
    else if (f == "nu1") s.nu1 = opt_measure(v, key, raw);
    else return false;
    return true;
  };
  const bool known = std::visit(
      overloaded{
          [&](GeneralJump& g) {
            if (f == "sigma") g.sigma = fn_from_value(v, key);
            else if (f == "drift") g.b = fn_from_value(v, key);
            else if (f == "h0") g.h0 = kernel_from_value(v, key);
            else if (f == "h1") g.h1 = kernel_from_value(v, key);
            else if (f == "mu0") g.mu0 = opt_measure(v, key, comp);
            else if (f == "mu1") g.mu1 = opt_measure(v, key, raw);
            else return false;
            return true;
          },
          [&](CBI& c) {
            if (f == "a") c.a = v.as_double(key);
            else if (f == "b") c.b = v.as_double(key);
            else if (f == "beta") c.beta = v.as_double(key);
            else if (f == "nu0") c.nu0 = opt_measure(v, key, comp);
            else if (f == "nu1") c.nu1 = opt_measure(v, key, raw);
            else return false;
            return true;
          },
          [&](StableCBI& s) { return stable_field(s); },
          [&](LevyDriven& l) {
            if (f == "sigma") l.sigma = fn_from_value(v, key);
            else if (f == "drift") l.b = fn_from_value(v, key);
            else if (f == "phi0") l.phi0 = fn_from_value(v, key);
            else if (f == "phi1") l.phi1 = fn_from_value(v, key);
            else if (f == "mu0") l.mu0 = opt_measure(v, key, comp);
            else if (f == "mu1") l.mu1 = opt_measure(v, key, raw);
            else if (f == "nu0") l.nu0 = opt_measure(v, key, comp);
            else if (f == "nu1") l.nu1 = opt_measure(v, key, raw);
            else return false;
            return true;
          },
          [&](CBIE& e) {
            if (f == "emigration") {
              e.emigration = opt_measure(v, key, raw);
              return true;
            }
            return stable_field(e.base);
          },
      },
      m.form);
  if (!known) bad(key, "not a field of model form '" + form_name(m.form) + "'");
}

void model_to_document(const ModelSpec& m, Document& d) {
  d.emplace_back("model.name", Value::string(m.name));
  d.emplace_back("model.form", Value::string(form_name(m.form)));
  auto stable_fields = [&](const StableCBI& s) {
    d.emplace_back("model.a", Value::number(s.a));
    d.emplace_back("model.b", Value::number(s.b));
    d.emplace_back("model.beta", Value::number(s.beta));
    d.emplace_back("model.c", Value::number(s.c));
    d.emplace_back("model.alpha", Value::number(s.alpha));
    d.emplace_back("model.nu1", opt_measure_value(s.nu1));
  };
  std::visit(overloaded{
                 [&](const GeneralJump& g) {
                   d.emplace_back("model.sigma", fn_to_value(g.sigma));
                   d.emplace_back("model.drift", fn_to_value(g.b));
                   d.emplace_back("model.h0", kernel_to_value(g.h0));
                   d.emplace_back("model.h1", kernel_to_value(g.h1));
                   d.emplace_back("model.mu0", opt_measure_value(g.mu0));
                   d.emplace_back("model.mu1", opt_measure_value(g.mu1));
                 },
                 [&](const CBI& c) {
                   d.emplace_back("model.a", Value::number(c.a));
                   d.emplace_back("model.b", Value::number(c.b));
                   d.emplace_back("model.beta", Value::number(c.beta));
                   d.emplace_back("model.nu0", opt_measure_value(c.nu0));
                   d.emplace_back("model.nu1", opt_measure_value(c.nu1));
                 },
                 [&](const StableCBI& s) { stable_fields(s); },
                 [&](const LevyDriven& l) {
                   d.emplace_back("model.sigma", fn_to_value(l.sigma));
                   d.emplace_back("model.drift", fn_to_value(l.b));
                   d.emplace_back("model.phi0", fn_to_value(l.phi0));
                   d.emplace_back("model.phi1", fn_to_value(l.phi1));
                   d.emplace_back("model.mu0", opt_measure_value(l.mu0));
                   d.emplace_back("model.mu1", opt_measure_value(l.mu1));
                   d.emplace_back("model.nu0", opt_measure_value(l.nu0));
                   d.emplace_back("model.nu1", opt_measure_value(l.nu1));
                 },
                 [&](const CBIE& e) {
                   stable_fields(e.base);
                   d.emplace_back("model.emigration", opt_measure_value(e.emigration));
                 },
             },
             m.form);
  d.emplace_back("model.h0_monotone", Value::boolean(m.h0_monotone));
  d.emplace_back("model.h1_monotone", Value::boolean(m.h1_monotone));
  if (m.drift_b2) d.emplace_back("model.b2", fn_to_value(*m.drift_b2));
}

}  // namespace

Value measure_to_value(const JumpMeasure& m) {
  Record r = std::visit(
      overloaded{
          [](const StablePowerLaw& s) {
            return Record{{"type", Value::string("stable")}, {"c", Value::number(s.c)}, {"alpha", Value::number(s.alpha)}};
          },
          [](const CompoundPoisson& p) {
            Record law = std::visit(
                overloaded{
                    [](const PointMass& q) { return Record{{"type", Value::string("point")}, {"at", Value::number(q.at)}}; },
                    [](const ExponentialLaw& e) {
                      return Record{{"type", Value::string("exp")}, {"mean", Value::number(e.mean)}};
                    },
                    [](const UniformLaw& u) {
                      return Record{{"type", Value::string("uniform")}, {"lo", Value::number(u.lo)}, {"hi", Value::number(u.hi)}};
                    },
                },
                p.law);
            return Record{{"type", Value::string("cpp")}, {"rate", Value::number(p.rate)}, {"law", Value{law}}};
          },
          [](const TabulatedDensity& t) {
            return Record{{"type", Value::string("table")}, {"points", pairs_to_value(t.points)}};
          },
      },
      m.kind());
  r.emplace_back("role", role_value(m.role()));
  return Value{r};
}

JumpMeasure measure_from_value(const Value& v, const std::string& key, MeasureRole role) {
  const Record& r = v.as_record(key);
  if (const Value* rv = find(r, "role")) {
    const auto& s = rv->as_string(key + ".role");
    if (s == "compensated") role = MeasureRole::Compensated;
    else if (s == "raw") role = MeasureRole::NonCompensated;
    else bad(key + ".role", "expected \"compensated\" or \"raw\"");
  }
  const std::string& type = field(r, "type", key).as_string(key + ".type");
  if (type == "stable") {
    only_fields(r, {"type", "c", "alpha", "role"}, key);
    return JumpMeasure::stable(num_field(r, "c", key), num_field(r, "alpha", key), role);
  }
  if (type == "cpp") {
    only_fields(r, {"type", "rate", "law", "role"}, key);
    const std::string lk = key + ".law";
    const Record& law = field(r, "law", key).as_record(lk);
    const std::string& lt = field(law, "type", lk).as_string(lk + ".type");
    JumpLaw jl;
    if (lt == "point") {
      only_fields(law, {"type", "at"}, lk);
      jl = PointMass{num_field(law, "at", lk)};
    } else if (lt == "exp") {
      only_fields(law, {"type", "mean"}, lk);
      jl = ExponentialLaw{num_field(law, "mean", lk)};
    } else if (lt == "uniform") {
      only_fields(law, {"type", "lo", "hi"}, lk);
      jl = UniformLaw{num_field(law, "lo", lk), num_field(law, "hi", lk)};
    } else {
      bad(lk + ".type", "unknown law '" + lt + "'");
    }
    return JumpMeasure::cpp(num_field(r, "rate", key), jl, role);
  }
  if (type == "table") {
    only_fields(r, {"type", "points", "role"}, key);
    return JumpMeasure::table(pairs_from_value(field(r, "points", key), key + ".points"), role);
  }
  bad(key + ".type", "unknown measure type '" + type + "'");
}

Value fn_to_value(const ScalarFn& f) {
  Record r = std::visit(
      overloaded{
          [](const ScalarFn::Const& c) { return Record{{"type", Value::string("const")}, {"value", Value::number(c.value)}}; },
          [](const ScalarFn::Affine& a) {
            return Record{{"type", Value::string("affine")}, {"slope", Value::number(a.slope)},
                          {"intercept", Value::number(a.intercept)}};
          },
          [](const ScalarFn::Power& p) {
            return Record{{"type", Value::string("power")}, {"coef", Value::number(p.coef)},
                          {"exponent", Value::number(p.exponent)}};
          },
          [](const ScalarFn::CappedLinear& c) {
            return Record{{"type", Value::string("capped")}, {"coef", Value::number(c.coef)}, {"cap", Value::number(c.cap)}};
          },
          [](const ScalarFn::Saturating& s) {
            return Record{{"type", Value::string("saturating")}, {"coef", Value::number(s.coef)}};
          },
          [](const ScalarFn::Table& t) { return Record{{"type", Value::string("table")}, {"points", pairs_to_value(t.points)}}; },
          [](const ScalarFn::Custom& c) -> Record {
            fail(ErrorKind::Config, "coefficient '" + c.name + "' is programmatic and cannot be written to a scenario");
          },
      },
      f.form());
  return Value{r};
}

ScalarFn fn_from_value(const Value& v, const std::string& key) {
  if (v.is_number()) return ScalarFn::constant(v.as_double(key));
  const Record& r = v.as_record(key);
  const std::string& type = field(r, "type", key).as_string(key + ".type");
  if (type == "const") {
    only_fields(r, {"type", "value"}, key);
    return ScalarFn::constant(num_field(r, "value", key));
  }
  if (type == "affine") {
    only_fields(r, {"type", "slope", "intercept"}, key);
    return ScalarFn::affine(num_field(r, "slope", key), num_field(r, "intercept", key));
  }
  if (type == "power") {
    only_fields(r, {"type", "coef", "exponent"}, key);
    return ScalarFn::power(num_field(r, "coef", key), num_field(r, "exponent", key));
  }
  if (type == "capped") {
    only_fields(r, {"type", "coef", "cap"}, key);
    return ScalarFn(ScalarFn::CappedLinear{num_field(r, "coef", key), num_field(r, "cap", key)});
  }
  if (type == "saturating") {
    only_fields(r, {"type", "coef"}, key);
    return ScalarFn(ScalarFn::Saturating{num_field(r, "coef", key)});
  }
  if (type == "table") {
    only_fields(r, {"type", "points"}, key);
    return ScalarFn(ScalarFn::Table{pairs_from_value(field(r, "points", key), key + ".points")});
  }
  bad(key + ".type", "unknown coefficient type '" + type + "'");
}

Scenario scenario_from_document(const Document& doc) {
  Scenario s;
  const Value* preset = nullptr;
  const Value* form = nullptr;
  for (const auto& [k, v] : doc) {
    if (k == "model.preset") preset = &v;
    if (k == "model.form") form = &v;
  }
  if (preset) {
    s.model = presets::by_name(preset->as_string("model.preset"));
    if (form && form->as_string("model.form") != form_name(s.model.form)) {
      bad("model.form", "preset '" + preset->as_string("model.preset") + "' has form '" + form_name(s.model.form) + "'");
    }
  } else if (form) {
    s.model.form = default_form(form->as_string("model.form"), "model.form");
    s.model.name = form->as_string("model.form");
  } else {
    fail(ErrorKind::Config, "model.preset: a scenario needs model.preset or model.form");
  }

  for (const auto& [k, v] : doc) {
    if (k == "model.preset" || k == "model.form") continue;
    if (k.rfind("model.", 0) == 0) {
      apply_model_key(s.model, k.substr(6), v, k);
    } else if (k == "config.dt") {
      s.config.dt_max = v.as_double(k);
    } else if (k == "config.horizon") {
      s.config.horizon = v.as_double(k);
    } else if (k == "config.paths") {
      s.config.n_paths = v.as_u64(k);
    } else if (k == "config.eps") {
      s.config.eps = v.as_double(k);
    } else if (k == "config.m_cap") {
      s.config.m_cap = v.as_double(k);
    } else if (k == "config.seed") {
      s.config.root_seed = v.as_u64(k);
    } else if (k == "config.cap_policy") {
      const auto& p = v.as_string(k);
      if (p == "extend") s.config.cap_policy = CapPolicy::Extend;
      else if (p == "stop") s.config.cap_policy = CapPolicy::Stop;
      else bad(k, "expected \"extend\" or \"stop\"");
    } else if (k == "config.max_doublings") {
      s.config.max_doublings = static_cast<int>(v.as_u64(k));
    } else if (k == "config.exact_stable") {
      s.config.exact_stable = v.as_bool(k);
    } else if (k == "config.x0") {
      s.x0 = v.as_double(k);
    } else if (k == "config.t_grid") {
      s.t_grid = doubles_from_value(v, k);
    } else if (k == "outputs.summary") {
      s.outputs.summary = v.as_string(k);
    } else if (k == "outputs.paths_csv") {
      s.outputs.paths_csv = v.as_string(k);
    } else if (k == "outputs.path_cap") {
      s.outputs.path_cap = v.as_u64(k);
    } else if (k == "outputs.svg") {
      s.outputs.svg = v.as_string(k);
    } else if (k == "diagnostics.tests") {
      s.diagnostics.tests = strings_from_value(v, k);
    } else if (k == "diagnostics.f") {
      s.diagnostics.f = v.as_string(k);
    } else if (k == "diagnostics.budget") {
      s.diagnostics.budget = v.as_double(k);
    } else if (k == "diagnostics.x0_low") {
      s.diagnostics.x0_low = v.as_double(k);
    } else if (k == "diagnostics.x0_high") {
      s.diagnostics.x0_high = v.as_double(k);
    } else if (k == "diagnostics.x0_star") {
      s.diagnostics.x0_star = v.as_double(k);
    } else if (k == "diagnostics.dependence_x0") {
      s.diagnostics.dependence_x0 = doubles_from_value(v, k);
    } else if (k == "diagnostics.t") {
      s.diagnostics.t = v.as_double(k);
    } else if (k == "diagnostics.sup_mode") {
      s.diagnostics.sup_mode = v.as_bool(k);
    } else if (k == "conditions.list") {
      s.conditions = strings_from_value(v, k);
    } else if (k == "gadget.C") {
      s.gadget.C = v.as_double(k);
    } else if (k == "gadget.gamma") {
      s.gadget.gamma = v.as_double(k);
    } else if (k == "gadget.k_max") {
      s.gadget.k_max = static_cast<int>(v.as_u64(k));
    } else if (k == "gadget.variant") {
      const auto& p = v.as_string(k);
      if (p == "symmetric") s.gadget.variant = GadgetVariant::Symmetric;
      else if (p == "one_sided") s.gadget.variant = GadgetVariant::OneSided;
      else bad(k, "expected \"symmetric\" or \"one_sided\"");
    } else if (k == "gadget.samples") {
      s.gadget.samples = v.as_u64(k);
    } else if (k == "gadget.phi_points") {
      s.gadget.phi_points = v.as_u64(k);
    } else {
      bad(k, "unknown key");
    }
  }
  return s;
}

Document scenario_to_document(const Scenario& s) {
  Document d;
  model_to_document(s.model, d);
  const auto& c = s.config;
  d.emplace_back("config.dt", Value::number(c.dt_max));
  d.emplace_back("config.horizon", Value::number(c.horizon));
  d.emplace_back("config.paths", Value::integer(c.n_paths));
  d.emplace_back("config.eps", Value::number(c.eps));
  d.emplace_back("config.m_cap", Value::number(c.m_cap));
  d.emplace_back("config.seed", Value::integer(c.root_seed));
  d.emplace_back("config.cap_policy", Value::string(c.cap_policy == CapPolicy::Extend ? "extend" : "stop"));
  d.emplace_back("config.max_doublings", Value::integer(static_cast<std::uint64_t>(c.max_doublings)));
  d.emplace_back("config.exact_stable", Value::boolean(c.exact_stable));
  d.emplace_back("config.x0", Value::number(s.x0));
  d.emplace_back("config.t_grid", doubles_to_value(s.t_grid));
  d.emplace_back("outputs.summary", Value::string(s.outputs.summary));
  d.emplace_back("outputs.paths_csv", Value::string(s.outputs.paths_csv));
  d.emplace_back("outputs.path_cap", Value::integer(s.outputs.path_cap));
  d.emplace_back("outputs.svg", Value::string(s.outputs.svg));
  const auto& g = s.diagnostics;
  d.emplace_back("diagnostics.tests", strings_to_value(g.tests));
  d.emplace_back("diagnostics.f", Value::string(g.f));
  d.emplace_back("diagnostics.budget", Value::number(g.budget));
  d.emplace_back("diagnostics.x0_low", Value::number(g.x0_low));
  d.emplace_back("diagnostics.x0_high", Value::number(g.x0_high));
  d.emplace_back("diagnostics.x0_star", Value::number(g.x0_star));
  d.emplace_back("diagnostics.dependence_x0", doubles_to_value(g.dependence_x0));
  d.emplace_back("diagnostics.t", Value::number(g.t));
  d.emplace_back("diagnostics.sup_mode", Value::boolean(g.sup_mode));
  d.emplace_back("conditions.list", strings_to_value(s.conditions));
  d.emplace_back("gadget.C", Value::number(s.gadget.C));
  d.emplace_back("gadget.gamma", Value::number(s.gadget.gamma));
  d.emplace_back("gadget.k_max", Value::integer(static_cast<std::uint64_t>(s.gadget.k_max)));
  d.emplace_back("gadget.variant",
                 Value::string(s.gadget.variant == GadgetVariant::Symmetric ? "symmetric" : "one_sided"));
  d.emplace_back("gadget.samples", Value::integer(s.gadget.samples));
  d.emplace_back("gadget.phi_points", Value::integer(s.gadget.phi_points));
  return d;
}

Scenario parse_scenario(const std::string& text) { return scenario_from_document(parse_document(text)); }

std::string serialize_scenario(const Scenario& s) { return serialize_document(scenario_to_document(s)); }

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Config, "--scenario: cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace nnjump::cli
