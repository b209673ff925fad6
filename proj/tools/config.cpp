#include "config.hpp"

#include <fstream>

namespace hysup::cli {

namespace {

using nlohmann::json;

double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<int>();
}

State as_vector(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  State out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(path, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw ConfigError(path + "." + it.key(), "unknown field");
  }
}

void parse_solver(const json& obj, SolverConfig& solver, double& conv_tol) {
  reject_unknown(obj, "solver",
                 {"dt", "guard_tol", "max_t", "max_j", "refine_iters", "jump_priority",
                  "conv_tol"});
  if (obj.contains("dt")) solver.dt = as_double(obj["dt"], "solver.dt");
  if (obj.contains("guard_tol")) solver.guard_tol = as_double(obj["guard_tol"], "solver.guard_tol");
  if (obj.contains("max_t")) solver.max_t = as_double(obj["max_t"], "solver.max_t");
  if (obj.contains("max_j")) solver.max_j = as_int(obj["max_j"], "solver.max_j");
  if (obj.contains("refine_iters"))
    solver.refine_iters = as_int(obj["refine_iters"], "solver.refine_iters");
  if (obj.contains("conv_tol")) conv_tol = as_double(obj["conv_tol"], "solver.conv_tol");
  if (obj.contains("jump_priority")) {
    const auto& v = obj["jump_priority"];
    if (!v.is_string()) throw ConfigError("solver.jump_priority", "expected a string");
    const std::string s = v.get<std::string>();
    if (s == "jump-first") {
      solver.jump_priority = JumpPriority::JumpFirst;
    } else if (s == "flow-first") {
      solver.jump_priority = JumpPriority::FlowFirst;
    } else {
      throw ConfigError("solver.jump_priority", "expected 'jump-first' or 'flow-first'");
    }
  }
}

DisturbanceChannel parse_channel(const json& obj, const std::string& path, int default_dim) {
  reject_unknown(obj, path,
                 {"kind", "dim", "bound", "amplitude", "frequency", "phase", "grid_dt", "seed",
                  "constant"});
  DisturbanceChannel ch;
  ch.dim = default_dim;
  if (obj.contains("kind")) {
    const std::string kind = obj["kind"].is_string() ? obj["kind"].get<std::string>() : "";
    if (kind == "zero") {
      ch.kind = DisturbanceChannel::Kind::Zero;
    } else if (kind == "constant") {
      ch.kind = DisturbanceChannel::Kind::Constant;
    } else if (kind == "sinusoid") {
      ch.kind = DisturbanceChannel::Kind::Sinusoid;
    } else if (kind == "noise") {
      ch.kind = DisturbanceChannel::Kind::Noise;
    } else {
      throw ConfigError(path + ".kind", "expected zero|constant|sinusoid|noise");
    }
  }
  if (obj.contains("dim")) ch.dim = as_int(obj["dim"], path + ".dim");
  if (obj.contains("bound")) ch.bound = as_double(obj["bound"], path + ".bound");
  if (obj.contains("amplitude")) ch.amplitude = as_double(obj["amplitude"], path + ".amplitude");
  if (obj.contains("frequency")) ch.frequency = as_double(obj["frequency"], path + ".frequency");
  if (obj.contains("phase")) ch.phase = as_double(obj["phase"], path + ".phase");
  if (obj.contains("grid_dt")) ch.grid_dt = as_double(obj["grid_dt"], path + ".grid_dt");
  if (obj.contains("seed")) ch.seed = obj["seed"].is_number_unsigned()
                                          ? obj["seed"].get<std::uint64_t>()
                                          : static_cast<std::uint64_t>(as_int(obj["seed"], path + ".seed"));
  if (obj.contains("constant")) ch.constant = as_vector(obj["constant"], path + ".constant");
  if (ch.bound < 0.0) throw ConfigError(path + ".bound", "bound must be nonnegative");
  return ch;
}

void parse_ex1_params(const json& obj, ex1::Example1Config& cfg) {
  reject_unknown(obj, "params", {"alpha_bar", "eps0a", "eps1a", "tau_star"});
  if (obj.contains("alpha_bar")) cfg.alpha_bar = as_double(obj["alpha_bar"], "params.alpha_bar");
  if (obj.contains("eps0a")) cfg.sup.eps0a = as_double(obj["eps0a"], "params.eps0a");
  if (obj.contains("eps1a")) cfg.sup.eps1a = as_double(obj["eps1a"], "params.eps1a");
  if (obj.contains("tau_star")) cfg.sup.tau_star = as_double(obj["tau_star"], "params.tau_star");
}

void parse_ex2_params(const json& obj, ex2::Example2Config& cfg) {
  reject_unknown(obj, "params",
                 {"eps0a", "eps1a", "tau_star", "mu", "lambda", "alpha_hat", "eps_local",
                  "route_offset", "barrier_width", "sigma", "xi_star", "xi_circ", "xi_bar"});
  if (obj.contains("eps0a")) cfg.sup.eps0a = as_double(obj["eps0a"], "params.eps0a");
  if (obj.contains("eps1a")) cfg.sup.eps1a = as_double(obj["eps1a"], "params.eps1a");
  if (obj.contains("tau_star")) cfg.sup.tau_star = as_double(obj["tau_star"], "params.tau_star");
  if (obj.contains("mu")) cfg.mu = as_double(obj["mu"], "params.mu");
  if (obj.contains("lambda")) cfg.lambda = as_double(obj["lambda"], "params.lambda");
  if (obj.contains("alpha_hat")) cfg.alpha_hat = as_double(obj["alpha_hat"], "params.alpha_hat");
  if (obj.contains("eps_local")) cfg.eps_local = as_double(obj["eps_local"], "params.eps_local");
  if (obj.contains("route_offset"))
    cfg.route_offset = as_double(obj["route_offset"], "params.route_offset");
  if (obj.contains("barrier_width"))
    cfg.barrier_width = as_double(obj["barrier_width"], "params.barrier_width");
  if (obj.contains("sigma")) cfg.sigma = as_double(obj["sigma"], "params.sigma");
  if (obj.contains("xi_star")) cfg.xi_star = as_vector(obj["xi_star"], "params.xi_star");
  if (obj.contains("xi_circ")) cfg.xi_circ = as_vector(obj["xi_circ"], "params.xi_circ");
  if (obj.contains("xi_bar")) cfg.xi_bar = as_vector(obj["xi_bar"], "params.xi_bar");
}

SweepSpec parse_sweep(const json& obj) {
  reject_unknown(obj, "sweep", {"kind", "values", "key", "n", "x1", "x2"});
  SweepSpec spec;
  if (!obj.contains("kind") || !obj["kind"].is_string())
    throw ConfigError("sweep.kind", "expected delta|initial|param");
  const std::string kind = obj["kind"].get<std::string>();
  if (kind == "delta") {
    spec.kind = SweepSpec::Kind::Delta;
    if (obj.contains("values")) spec.values = as_vector(obj["values"], "sweep.values");
  } else if (kind == "param") {
    spec.kind = SweepSpec::Kind::Param;
    if (!obj.contains("key") || !obj["key"].is_string())
      throw ConfigError("sweep.key", "expected the parameter name to vary");
    spec.param_key = obj["key"].get<std::string>();
    if (obj.contains("values")) spec.values = as_vector(obj["values"], "sweep.values");
  } else if (kind == "initial") {
    spec.kind = SweepSpec::Kind::Initial;
    if (!obj.contains("n")) throw ConfigError("sweep.n", "grid size required");
    spec.grid_n = as_int(obj["n"], "sweep.n");
    const State x1 = as_vector(obj.value("x1", json::array({-10.0, 10.0})), "sweep.x1");
    const State x2 = as_vector(obj.value("x2", json::array({-10.0, 10.0})), "sweep.x2");
    if (x1.size() != 2 || x2.size() != 2)
      throw ConfigError("sweep.x1", "expected [min, max] ranges");
    spec.x1_min = x1[0];
    spec.x1_max = x1[1];
    spec.x2_min = x2[0];
    spec.x2_max = x2[1];
  } else {
    throw ConfigError("sweep.kind", "expected delta|initial|param");
  }
  return spec;
}

}  // namespace

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
}

void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& overrides) {
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--param", "expected key=value: " + kv);
    std::string key = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);

    nlohmann::json value;
    try {
      value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error&) {
      value = raw;  // plain string
    }

    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
      const auto dot = key.find('.', pos);
      if (dot == std::string::npos) {
        parts.push_back(key.substr(pos));
        break;
      }
      parts.push_back(key.substr(pos, dot - pos));
      pos = dot + 1;
    }
    if (parts.size() == 1) parts.insert(parts.begin(), "params");

    nlohmann::json* node = &doc;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &((*node)[parts[i]]);
    (*node)[parts.back()] = value;
  }
}

RunSpec parse_run_spec(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config", "expected a JSON object");
  reject_unknown(doc, "config",
                 {"preset", "example", "params", "initial", "solver", "disturbance", "sweep",
                  "out"});

  RunSpec spec;
  std::string example = "ex1";
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) throw ConfigError("preset", "expected a preset name");
    spec.scenario = make_preset(doc["preset"].get<std::string>());
    example = spec.scenario.is_ex1() ? "ex1" : "ex2";
  } else {
    if (doc.contains("example")) {
      if (!doc["example"].is_string()) throw ConfigError("example", "expected 'ex1' or 'ex2'");
      example = doc["example"].get<std::string>();
    }
    if (example == "ex1") {
      spec.scenario = make_preset("ex1-figA");
      spec.scenario.name = "ex1";
    } else if (example == "ex2") {
      spec.scenario = make_preset("ex2-below");
      spec.scenario.name = "ex2";
    } else {
      throw ConfigError("example", "expected 'ex1' or 'ex2'");
    }
  }

  if (doc.contains("params")) {
    if (spec.scenario.is_ex1()) {
      parse_ex1_params(doc["params"], std::get<ex1::Example1Config>(spec.scenario.config));
    } else {
      parse_ex2_params(doc["params"], std::get<ex2::Example2Config>(spec.scenario.config));
    }
  }

  if (doc.contains("initial")) {
    const auto& init = doc["initial"];
    reject_unknown(init, "initial", {"xi", "q", "z0", "z1", "tau", "zeta1"});
    auto apply = [&](auto& cfg) {
      if (init.contains("xi")) {
        cfg.xi0 = as_vector(init["xi"], "initial.xi");
        if (cfg.xi0.size() != 2) throw ConfigError("initial.xi", "expected two components");
      }
      if (init.contains("q")) cfg.q0 = as_int(init["q"], "initial.q");
      if (init.contains("z0")) cfg.z0_init = as_double(init["z0"], "initial.z0");
      if (init.contains("z1")) cfg.z1_init = as_double(init["z1"], "initial.z1");
      if (init.contains("tau")) cfg.tau0 = as_double(init["tau"], "initial.tau");
    };
    if (spec.scenario.is_ex1()) {
      if (init.contains("zeta1")) throw ConfigError("initial.zeta1", "not a state of example 1");
      apply(std::get<ex1::Example1Config>(spec.scenario.config));
    } else {
      auto& cfg = std::get<ex2::Example2Config>(spec.scenario.config);
      apply(cfg);
      if (init.contains("zeta1")) cfg.zeta1_0 = as_int(init["zeta1"], "initial.zeta1");
    }
  }

  if (doc.contains("solver")) {
    parse_solver(doc["solver"], spec.scenario.solver, spec.scenario.conv_tol);
  }

  if (doc.contains("disturbance")) {
    const auto& dist = doc["disturbance"];
    reject_unknown(dist, "disturbance", {"d1", "d2", "d3", "d4"});
    const int m_p = 2;
    const int n_p = 2;
    const int y0_dim = example == "ex1" ? 1 : 2;
    const int y1_dim = example == "ex1" ? 1 : 6;
    if (dist.contains("d1")) spec.disturbance.d1 = parse_channel(dist["d1"], "disturbance.d1", m_p);
    if (dist.contains("d2")) spec.disturbance.d2 = parse_channel(dist["d2"], "disturbance.d2", n_p);
    if (dist.contains("d3")) spec.disturbance.d3 = parse_channel(dist["d3"], "disturbance.d3", y0_dim);
    if (dist.contains("d4")) spec.disturbance.d4 = parse_channel(dist["d4"], "disturbance.d4", y1_dim);
  }

  if (doc.contains("sweep")) spec.sweep = parse_sweep(doc["sweep"]);
  return spec;
}

}  // namespace hysup::cli
