#include "maght/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "maght/errors.hpp"
#include "maght/rng.hpp"

namespace maght {

using nlohmann::json;

ScoreResult score(const GravityPose& truth, const GravityPose& est) {
  ScoreResult s;
  s.translation_error = (est.translation() - truth.translation()).norm();
  s.yaw_error = std::abs(wrap_pi(est.psi - truth.psi));
  s.correct = s.translation_error < kCorrectTranslation &&
              s.yaw_error < kCorrectYaw;
  return s;
}

MethodSpec parse_method(const std::string& name) {
  MethodSpec spec;
  spec.name = name;
  if (name == "maght") {
    spec.kind = MethodSpec::Kind::maght;
    return spec;
  }
  if (name.rfind("pf", 0) == 0 && name.size() > 2) {
    spec.kind = MethodSpec::Kind::pf;
    spec.particles = std::stoi(name.substr(2));
    if (spec.particles < 1) {
      throw std::invalid_argument("method: particle count must be >= 1");
    }
    return spec;
  }
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected maght or pf<N>)");
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

CaseOutcome run_maght_case(const Case& c, const MagneticMap& map,
                           const MaghtParams& params, bool timing) {
  CaseOutcome out;
  const auto t0 = Clock::now();
  const RelocResult r = relocalize(c.input, map, params);
  const double elapsed = ms_between(t0, Clock::now());

  out.converged = r.converged;
  out.votes = r.total_votes;
  out.cluster_size = r.cluster_size();
  out.wall_ms = timing ? elapsed : 0.0;
  if (r.converged) {
    // Score in the barycenter-recentered frame, where the frame origin sits
    // at the data. Scoring at the original (arbitrarily distant) odometry
    // origin would re-introduce the lever-arm amplification of yaw error
    // that the recentering exists to remove.
    const GravityPose truth_recentered =
        compose(c.truth, GravityPose{r.barycenter.x, r.barycenter.y,
                                     r.barycenter.z, 0.0});
    const ScoreResult s = score(truth_recentered, r.pose);
    out.translation_error = s.translation_error;
    out.yaw_error = s.yaw_error;
    out.correct = s.correct && c.in_map;
  }
  return out;
}

CaseOutcome run_pf_case(const Case& c, const MagneticMap& map,
                        const PfParams& params, bool timing) {
  CaseOutcome out;
  const auto& samples = c.input.samples;
  if (samples.size() < 2) throw TooShort("pf: need at least 2 samples");

  std::mt19937_64 rng = make_rng(c.seed, 100 + params.n_particles);

  const auto t0 = Clock::now();
  std::vector<Particle> particles =
      pf_init(map, samples.front().m, params, rng);

  bool converged = false;
  double ms_to_convergence = 0.0;
  for (size_t k = 1; k < samples.size(); ++k) {
    const Vec3 d = samples[k].position - samples[k - 1].position;
    pf_step(particles, OdomDelta{d.x, d.y, 0.0}, samples[k].m, map, params,
            rng);
    if (!converged) {
      const PfDecision decision = pf_converged(particles, map, params);
      if (decision.converged) {
        converged = true;
        ms_to_convergence = ms_between(t0, Clock::now());
      }
    }
  }
  const double ms_total = ms_between(t0, Clock::now());

  out.converged = converged;
  out.wall_ms = timing ? (converged ? ms_to_convergence : ms_total) : 0.0;
  if (converged) {
    // Filtering estimates improve with every measure; score the final one
    // against the ground-truth pose of the last sensor frame.
    const PfDecision final_decision = pf_converged(particles, map, params);
    const GravityPose truth_last{c.last_world_position.x,
                                 c.last_world_position.y,
                                 c.last_world_position.z, c.truth.psi};
    const ScoreResult s = score(truth_last, final_decision.pose);
    out.translation_error = s.translation_error;
    out.yaw_error = s.yaw_error;
    out.correct = s.correct && c.in_map;
  }
  return out;
}

}  // namespace

EvalReport run_experiment(const Scenario& scenario,
                          const std::vector<MethodSpec>& methods,
                          const MaghtParams& maght_params,
                          const PfParams& pf_params,
                          const RunOptions& options) {
  maght_params.validate();
  pf_params.validate();

  EvalReport report;
  report.scenario_id = scenario.spec.id();
  report.maght_params = maght_params;
  report.pf_params = pf_params;

  const auto wanted = [&options](double len) {
    if (options.lengths.empty()) return true;
    for (double l : options.lengths) {
      if (std::abs(l - len) < 0.5) return true;
    }
    return false;
  };

  for (const MethodSpec& method : methods) {
    for (size_t i = 0; i < scenario.cases.size(); ++i) {
      const Case& c = scenario.cases[i];
      if (!wanted(c.traj_len)) continue;

      CaseOutcome out;
      try {
        if (method.kind == MethodSpec::Kind::maght) {
          out = run_maght_case(c, scenario.map, maght_params, options.timing);
        } else {
          PfParams params = pf_params;
          params.n_particles = method.particles;
          out = run_pf_case(c, scenario.map, params, options.timing);
        }
      } catch (const std::exception& e) {
        out = CaseOutcome{};
        out.failure = e.what();
      }
      out.scenario_id = report.scenario_id;
      out.case_id = static_cast<int>(i);
      out.method = method.name;
      out.traj_len = c.traj_len;
      out.in_map = c.in_map;
      out.tag = c.tag;
      report.outcomes.push_back(std::move(out));
    }
  }
  return report;
}

namespace {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  if (v.size() == 1) return v[0];
  const double pos = q * (v.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  const size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - lo;
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

}  // namespace

std::vector<Aggregate> aggregate(const EvalReport& report) {
  std::map<std::tuple<std::string, double, std::string>,
           std::vector<const CaseOutcome*>>
      groups;
  for (const CaseOutcome& o : report.outcomes) {
    // Nominal lengths: group by the rounded meter so path-length jitter in
    // generated cases does not split groups.
    const double len = std::round(o.traj_len);
    groups[{o.method, len, o.tag}].push_back(&o);
  }

  std::vector<Aggregate> out;
  for (const auto& [key, members] : groups) {
    Aggregate a;
    a.method = std::get<0>(key);
    a.traj_len = std::get<1>(key);
    a.tag = std::get<2>(key);
    a.cases = static_cast<int>(members.size());

    std::vector<double> t_errs, yaw_errs, walls;
    for (const CaseOutcome* o : members) {
      a.in_map_cases += o->in_map ? 1 : 0;
      a.converged += o->converged ? 1 : 0;
      a.correct += o->correct ? 1 : 0;
      walls.push_back(o->wall_ms);
      if (o->correct) {
        t_errs.push_back(o->translation_error);
        yaw_errs.push_back(o->yaw_error);
      }
    }
    if (a.in_map_cases > 0) {
      a.recall = static_cast<double>(a.correct) / a.in_map_cases;
    }
    if (a.converged > 0) {
      a.precision = static_cast<double>(a.correct) / a.converged;
    }
    if (!t_errs.empty()) {
      a.median_translation_error = quantile(t_errs, 0.5);
      a.p90_translation_error = quantile(t_errs, 0.9);
      a.median_yaw_error = quantile(yaw_errs, 0.5);
    }
    a.median_wall_ms = quantile(walls, 0.5);
    a.p90_wall_ms = quantile(walls, 0.9);
    out.push_back(std::move(a));
  }
  return out;
}

std::string emit_table(const EvalReport& report) {
  std::ostringstream os;
  os << "scenario: " << report.scenario_id << "\n";
  os << "method      len_m  tag        cases  recall   precis   med_terr_m"
        "  med_yaw_deg  med_wall_ms\n";
  for (const Aggregate& a : aggregate(report)) {
    char line[256];
    const std::string recall =
        a.recall ? fmt("%.1f%%", 100.0 * *a.recall) : "-";
    const std::string precision =
        a.precision ? fmt("%.1f%%", 100.0 * *a.precision) : "-";
    const std::string terr =
        a.median_translation_error ? fmt("%.3f", *a.median_translation_error)
                                   : "-";
    const std::string yerr =
        a.median_yaw_error ? fmt("%.2f", *a.median_yaw_error * 180.0 / kPi)
                           : "-";
    std::snprintf(line, sizeof(line),
                  "%-10s %6.1f  %-9s %6d  %-7s  %-7s  %-10s  %-11s  %.3f\n",
                  a.method.c_str(), a.traj_len,
                  a.tag.empty() ? "-" : a.tag.c_str(), a.cases, recall.c_str(),
                  precision.c_str(), terr.c_str(), yerr.c_str(),
                  a.median_wall_ms);
    os << line;
  }
  return os.str();
}

std::string emit_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "scenario_id,case_id,method,traj_len_m,converged,t_err_m,"
        "yaw_err_deg,correct,wall_ms,votes,cluster_size\n";
  for (const CaseOutcome& o : report.outcomes) {
    os << o.scenario_id << ',' << o.case_id << ',' << o.method << ','
       << fmt("%.3f", o.traj_len) << ',' << (o.converged ? 1 : 0) << ',';
    if (o.converged) {
      os << fmt("%.6f", o.translation_error) << ','
         << fmt("%.6f", o.yaw_error * 180.0 / kPi);
    } else {
      os << ',';
    }
    os << ',' << (o.correct ? 1 : 0) << ',' << fmt("%.3f", o.wall_ms) << ','
       << o.votes << ',' << o.cluster_size << '\n';
  }
  return os.str();
}

namespace {

json maght_params_to_json(const MaghtParams& p) {
  return json{{"lambda", p.lambda},
              {"eps", p.eps},
              {"minpts", p.minpts},
              {"r", p.r},
              {"delta_max", p.delta_max},
              {"alpha", p.alpha},
              {"smoothing_window", p.smoothing_window},
              {"horizontal_floor", p.horizontal_floor}};
}

MaghtParams maght_params_from_json(const json& j) {
  MaghtParams p;
  p.lambda = j.at("lambda");
  p.eps = j.at("eps");
  p.minpts = j.at("minpts");
  p.r = j.at("r");
  p.delta_max = j.at("delta_max");
  p.alpha = j.at("alpha");
  p.smoothing_window = j.at("smoothing_window");
  p.horizontal_floor = j.at("horizontal_floor");
  return p;
}

json pf_params_to_json(const PfParams& p) {
  return json{{"n_particles", p.n_particles},
              {"sigma_trans", p.sigma_trans},
              {"sigma_rot", p.sigma_rot},
              {"sigma_meas", p.sigma_meas},
              {"ess_threshold", p.ess_threshold},
              {"convergence_std", p.convergence_std},
              {"init_yaw_jitter", p.init_yaw_jitter},
              {"horizontal_floor", p.horizontal_floor}};
}

PfParams pf_params_from_json(const json& j) {
  PfParams p;
  p.n_particles = j.at("n_particles");
  p.sigma_trans = j.at("sigma_trans");
  p.sigma_rot = j.at("sigma_rot");
  p.sigma_meas = j.at("sigma_meas");
  p.ess_threshold = j.at("ess_threshold");
  p.convergence_std = j.at("convergence_std");
  p.init_yaw_jitter = j.at("init_yaw_jitter");
  p.horizontal_floor = j.at("horizontal_floor");
  return p;
}

}  // namespace

std::string emit_jsonl(const EvalReport& report) {
  std::ostringstream os;
  os << json{{"type", "header"},
             {"schema", "maght.report/1"},
             {"scenario_id", report.scenario_id},
             {"maght_params", maght_params_to_json(report.maght_params)},
             {"pf_params", pf_params_to_json(report.pf_params)}}
            .dump()
     << '\n';
  for (const CaseOutcome& o : report.outcomes) {
    os << json{{"type", "outcome"},
               {"case_id", o.case_id},
               {"method", o.method},
               {"traj_len", o.traj_len},
               {"in_map", o.in_map},
               {"converged", o.converged},
               {"t_err", o.translation_error},
               {"yaw_err", o.yaw_error},
               {"correct", o.correct},
               {"wall_ms", o.wall_ms},
               {"votes", o.votes},
               {"cluster_size", o.cluster_size},
               {"failure", o.failure},
               {"tag", o.tag}}
              .dump()
       << '\n';
  }
  return os.str();
}

EvalReport parse_jsonl(const std::string& text) {
  EvalReport report;
  std::istringstream is(text);
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError(std::string("report: bad json line: ") + e.what());
    }
    const std::string type = j.value("type", "");
    if (type == "header") {
      if (j.value("schema", "") != "maght.report/1") {
        throw SchemaError("report: unsupported schema version");
      }
      report.scenario_id = j.at("scenario_id");
      report.maght_params = maght_params_from_json(j.at("maght_params"));
      report.pf_params = pf_params_from_json(j.at("pf_params"));
      have_header = true;
    } else if (type == "outcome") {
      CaseOutcome o;
      o.scenario_id = report.scenario_id;
      o.case_id = j.at("case_id");
      o.method = j.at("method");
      o.traj_len = j.at("traj_len");
      o.in_map = j.at("in_map");
      o.converged = j.at("converged");
      o.translation_error = j.at("t_err");
      o.yaw_error = j.at("yaw_err");
      o.correct = j.at("correct");
      o.wall_ms = j.at("wall_ms");
      o.votes = j.at("votes");
      o.cluster_size = j.at("cluster_size");
      o.failure = j.at("failure");
      o.tag = j.at("tag");
      report.outcomes.push_back(std::move(o));
    } else {
      throw SchemaError("report: unknown line type '" + type + "'");
    }
  }
  if (!have_header) throw SchemaError("report: missing header line");
  return report;
}

}  // namespace maght
