// SPDX-License-Identifier: Apache-2.0
//
// cpac: batch runner for the learning-theory scenarios.
//
//   cpac <command> [--config file.json] [--seed N] [--out path] [--trials N]
//                  [--budget-programs N] [--budget-steps N] [command flags]
//
// Exit status: 0 pass, 2 property failure, 1 configuration error (a JSON
// error record goes to stderr).

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "cpac/cpac.hpp"

using namespace cpac;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed, trials, budget_programs, budget_steps, n, program;
  std::string out;
  std::string mode, cls;
};

/// A JSON object whose keys must all be known to the command reading it.
class Config {
 public:
  Config(json j, std::set<std::string> allowed) : j_(std::move(j)) {
    if (!j_.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [k, v] : j_.items()) {
      if (!allowed.count(k)) throw ConfigError("unknown config key '" + k + "'");
    }
  }

  bool has(const std::string& k) const { return j_.contains(k); }

  std::uint64_t u64(const std::string& k, std::uint64_t dflt) const {
    if (!has(k)) return dflt;
    const json& v = j_.at(k);
    if (!v.is_number_unsigned()) throw ConfigError("'" + k + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  Rational rational(const std::string& k, const Rational& dflt) const {
    if (!has(k)) return dflt;
    const json& v = j_.at(k);
    if (!v.is_string()) throw ConfigError("'" + k + "' must be a \"p/q\" string");
    return Rational::parse(v.get<std::string>());
  }

  std::string choice(const std::string& k, const std::string& dflt, const std::set<std::string>& options) const {
    std::string s = dflt;
    if (has(k)) {
      if (!j_.at(k).is_string()) throw ConfigError("'" + k + "' must be a string");
      s = j_.at(k).get<std::string>();
    }
    if (!options.count(s)) throw ConfigError("'" + k + "' has unsupported value '" + s + "'");
    return s;
  }

  bool boolean(const std::string& k, bool dflt) const {
    if (!has(k)) return dflt;
    if (!j_.at(k).is_boolean()) throw ConfigError("'" + k + "' must be true or false");
    return j_.at(k).get<bool>();
  }

  std::vector<std::uint64_t> u64_list(const std::string& k) const {
    std::vector<std::uint64_t> out;
    if (!has(k)) return out;
    if (!j_.at(k).is_array()) throw ConfigError("'" + k + "' must be an array of integers");
    for (const auto& v : j_.at(k)) {
      if (!v.is_number_unsigned()) throw ConfigError("'" + k + "' must be an array of nonnegative integers");
      out.push_back(v.get<std::uint64_t>());
    }
    return out;
  }

  const json& raw(const std::string& k) const { return j_.at(k); }

 private:
  json j_;
};

const std::set<std::string> kCommonKeys{"seed", "trials", "budget_programs", "budget_steps", "out"};

Config load_config(const Flags& f, std::set<std::string> keys) {
  keys.insert(kCommonKeys.begin(), kCommonKeys.end());
  if (f.config.empty()) return Config(json::object(), keys);
  std::ifstream in(f.config);
  if (!in) throw ConfigError("cannot read config file " + f.config);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return Config(std::move(j), keys);
}

/// Resolved run-wide settings: flags override the config file.
struct Run {
  std::string command;
  std::uint64_t seed = 1;
  std::uint64_t trials = 500;
  std::uint64_t budget_programs = 256;
  std::uint64_t budget_steps = 10000;
  std::string out;
};

Run resolve(const std::string& command, const Flags& f, const Config& c) {
  Run r;
  r.command = command;
  r.seed = f.seed.value_or(c.u64("seed", r.seed));
  r.trials = f.trials.value_or(c.u64("trials", r.trials));
  r.budget_programs = f.budget_programs.value_or(c.u64("budget_programs", r.budget_programs));
  r.budget_steps = f.budget_steps.value_or(c.u64("budget_steps", r.budget_steps));
  if (c.has("out")) {
    if (!c.raw("out").is_string()) throw ConfigError("'out' must be a string");
    r.out = c.raw("out").get<std::string>();
  }
  if (!f.out.empty()) r.out = f.out;
  if (r.budget_steps < 1) throw ConfigError("budget_steps must be positive");
  return r;
}

class Report {
 public:
  explicit Report(const Run& run) : run_(run) {}

  void meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }
  void meta(const std::string& key, std::uint64_t value) { meta(key, std::to_string(value)); }
  void header(std::string h) { header_ = std::move(h); }
  void row(std::string r) { rows_.push_back(std::move(r)); }

  int finish(bool pass, bool budget_relative) const {
    std::ostringstream os;
    os << "# cpac report\n";
    os << "# artifact_version=" << kVersion << '\n';
    os << "# command=" << run_.command << '\n';
    os << "# seed=" << run_.seed << '\n';
    os << "# budget_programs=" << run_.budget_programs << '\n';
    os << "# budget_steps=" << run_.budget_steps << '\n';
    os << "# budget_relative=" << (budget_relative ? "true" : "false") << '\n';
    for (const auto& [k, v] : meta_) os << "# " << k << '=' << v << '\n';
    os << "# verdict=" << (pass ? "pass" : "fail") << '\n';
    if (!header_.empty()) os << header_ << '\n';
    for (const auto& r : rows_) os << r << '\n';
    if (run_.out.empty()) {
      std::cout << os.str();
    } else {
      std::ofstream f(run_.out, std::ios::binary);
      if (!f) throw ConfigError("cannot write " + run_.out);
      f << os.str();
    }
    return pass ? 0 : 2;
  }

 private:
  const Run& run_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::string header_;
  std::vector<std::string> rows_;
};

template <class T>
std::string join(const std::vector<T>& xs, char sep = ';') {
  std::ostringstream os;
  for (std::size_t k = 0; k < xs.size(); ++k) os << (k ? std::string(1, sep) : "") << xs[k];
  return os.str();
}

std::string bits_str(const std::vector<std::uint8_t>& bits) {
  std::string s;
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

/// "closed-form" (the ERM bound at d) or a constant sample size.
SampleFunctionSpec sample_function(const Config& c, std::uint64_t d, LogBase base) {
  if (!c.has("m")) return SampleFunctionSpec::closed_form(d, base);
  const json& v = c.raw("m");
  if (v.is_string() && v.get<std::string>() == "closed-form") return SampleFunctionSpec::closed_form(d, base);
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > 0) return SampleFunctionSpec::constant(v.get<std::uint64_t>());
  throw ConfigError("'m' must be \"closed-form\" or a positive integer");
}

LogBase log_base(const Config& c) {
  const std::string b = c.choice("log_base", "e", {"e", "2", "10"});
  return b == "2" ? LogBase::two : (b == "10" ? LogBase::ten : LogBase::natural);
}

void check_unit(const Rational& q, const std::string& name) {
  if (!(Rational(0) < q && q < Rational(1))) throw ConfigError("'" + name + "' must lie strictly between 0 and 1");
}

std::vector<PointDescription<Rational>> stump_pool(std::uint64_t size) {
  std::vector<PointDescription<Rational>> pool;
  const long long half = static_cast<long long>(size / 2);
  for (long long j = -half; j < static_cast<long long>(size) - half; ++j) pool.push_back(generic_point(Rational(j, 16), 8));
  return pool;
}

// ---------------------------------------------------------------------------

int cmd_vc(const Flags& f) {
  Config c = load_config(f, {"class", "pool", "d_max", "ideal_budget", "expect"});
  Run run = resolve("vc", f, c);
  const std::string cls = f.cls.empty() ? c.choice("class", "stump", {"stump", "halting", "apply"})
                                        : Config(json{{"class", f.cls}}, {"class"}).choice("class", "", {"stump", "halting", "apply"});
  const std::uint64_t pool_size = c.u64("pool", 64);
  const std::uint64_t d_max = c.u64("d_max", 2);
  if (pool_size < 1 || d_max < 1) throw ConfigError("pool and d_max must be positive");
  Report rep(run);
  VcResult r;
  std::uint64_t scanned = 0;
  bool budget_relative = false;
  if (cls == "stump") {
    auto h = stump_presentation();
    const std::uint64_t budget = c.u64("ideal_budget", 4096);
    scanned = h.index_space.scan_limit(budget);
    r = vc_lower_bound(h, stump_pool(pool_size), d_max, budget);
    rep.meta("pool", "generic(j/16) for j in [-pool/2, pool/2)");
  } else if (cls == "halting") {
    auto hc = halting_presentation(run.budget_programs, run.budget_steps);
    std::vector<PointDescription<std::uint64_t>> pool;
    for (std::uint64_t n = 0; n < pool_size; ++n) pool.push_back(PointDescription<std::uint64_t>::constant(n));
    const std::uint64_t budget = c.u64("ideal_budget", hc.halting.entries.size());
    scanned = hc.presentation.index_space.scan_limit(budget);
    r = vc_lower_bound(hc.presentation, pool, d_max, budget);
    rep.meta("pool", "programs 0..pool-1");
    budget_relative = true;
  } else {
    auto h = apply_presentation();
    std::vector<PointDescription<std::uint64_t>> pool;
    for (std::uint64_t n = 0; n < pool_size; ++n) pool.push_back(PointDescription<std::uint64_t>::constant(n));
    const std::uint64_t budget = c.u64("ideal_budget", std::uint64_t{1} << std::min<std::uint64_t>(pool_size, 16));
    scanned = h.index_space.scan_limit(budget);
    r = vc_lower_bound(h, pool, d_max, budget);
    rep.meta("pool", "naturals 0..pool-1");
  }
  rep.meta("class", cls);
  rep.header("class,pool_size,d_max,ideals_scanned,vc_lower_bound,witness,refuted_next");
  std::ostringstream row;
  row << cls << ',' << pool_size << ',' << d_max << ',' << scanned << ',' << r.lower_bound << ',' << join(r.witness)
      << ',' << r.refuted_next;
  rep.row(row.str());
  bool pass = true;
  if (c.has("expect")) pass = r.lower_bound == c.u64("expect", 0);
  return rep.finish(pass, budget_relative);
}

int cmd_erm(const Flags& f) {
  Config c = load_config(f, {"mode", "samples", "max_size", "stages", "ideal_budget"});
  Run run = resolve("erm", f, c);
  const std::set<std::string> modes{"realizable", "anytime", "behavior"};
  const std::string mode =
      f.mode.empty() ? c.choice("mode", "realizable", modes) : Config(json{{"mode", f.mode}}, {"mode"}).choice("mode", "", modes);
  const std::uint64_t count = c.u64("samples", 200);
  const std::uint64_t max_size = c.u64("max_size", 64);
  const std::uint64_t K = c.u64("stages", 96);
  const std::uint64_t budget = c.u64("ideal_budget", 4096);
  if (max_size < 1 || K < 1) throw ConfigError("max_size and stages must be positive");

  auto h = stump_presentation();
  auto count_oracle = [](const std::vector<PointDescription<Rational>>& U) { return std::uint64_t{U.size() + 1}; };
  Report rep(run);
  rep.meta("class", "stump");
  rep.meta("mode", mode);
  rep.meta("corpus", "realizable stump samples, features generic(j/16) for j in [-48, 48]");
  rep.header("sample_id,size,ideal,hypothesis,empirical_error,reference_ideal,stabilized_at,agree");
  bool pass = true;
  std::uint64_t id = 0;
  for (const auto& item : realizable_stump_corpus(count, max_size, run.seed)) {
    const IdealId ref = erm_realizable(h, item.sample, budget);
    IdealId got = ref;
    std::string stab;
    if (mode == "anytime") {
      auto st = erm_anytime(h, item.sample, K);
      got = st.last();
      if (st.stabilized_at) stab = std::to_string(*st.stabilized_at);
    } else if (mode == "behavior") {
      got = erm_behavior_count<Rational, Rational>(h, item.sample, count_oracle, budget);
    }
    const Rational err = empirical_error_of(h, got, item.sample);
    // least index: every earlier ideal mislabels something
    bool least = true;
    for (std::uint64_t e = 0; e < ref.index && least; ++e) least = !empirical_error_of(h, IdealId{e}, item.sample).is_zero();
    bool agree = got == ref && err.is_zero() && least;
    if (mode == "anytime") agree = agree && !stab.empty();
    pass = pass && agree;
    std::ostringstream row;
    row << id++ << ',' << item.sample.size() << ',' << got.index << ',' << h.index_space.ideal(got) << ',' << err << ','
        << ref.index << ',' << stab << ',' << (agree ? 1 : 0);
    rep.row(row.str());
  }
  return rep.finish(pass, false);
}

int cmd_stump(const Flags& f) {
  Config c = load_config(f, {"samples", "max_size"});
  Run run = resolve("stump", f, c);
  const std::uint64_t count = c.u64("samples", 50);
  const std::uint64_t max_size = c.u64("max_size", 32);
  if (max_size < 1) throw ConfigError("max_size must be positive");
  const auto en = RationalEnumeration::diagonal();
  Report rep(run);
  rep.meta("learner", "A_step: least i with zero empirical error of the stump at q_i");
  rep.meta("enumeration", "0, 1, -1, 1/2, -1/2, 2, -2, 1/3, ...");
  rep.header("sample_id,size,index,cutoff,empirical_error,generating_cutoff,least_index");
  bool pass = true;
  std::uint64_t id = 0;
  for (const auto& item : realizable_stump_corpus(count, max_size, run.seed)) {
    const IdealId i = stump_proper_learner(item.sample, en);
    const Rational q = en.at(i);
    const Rational err = empirical_error(stump_hypothesis(q), item.sample);
    bool least = true;
    for (std::uint64_t e = 0; e < i.index && least; ++e) least = !stump_consistent(en.at(IdealId{e}), item.sample, kDefaultCap);
    pass = pass && least && err.is_zero();
    std::ostringstream row;
    row << id++ << ',' << item.sample.size() << ',' << i.index << ',' << q << ',' << err << ',' << item.cutoff << ','
        << (least ? 1 : 0);
    rep.row(row.str());
  }
  return rep.finish(pass, false);
}

int cmd_pac(const Flags& f) {
  Config c = load_config(f, {"distribution", "cutoff", "learner", "constant", "epsilon", "delta", "m", "threads",
                             "strict", "log_base"});
  Run run = resolve("pac-validate", f, c);
  const std::string dist = c.choice("distribution", "concentrated-third", {"concentrated-third", "uniform"});
  const std::string learner = c.choice("learner", "a-step", {"a-step", "best-in-class", "constant"});
  const Rational eps = c.rational("epsilon", Rational(1, 10));
  const Rational delta = c.rational("delta", Rational(1, 10));
  check_unit(eps, "epsilon");
  check_unit(delta, "delta");
  if (run.trials < 1) throw ConfigError("trials must be positive");
  const LogBase base = log_base(c);
  std::uint64_t m = 1000;
  std::string m_source = "fixed";
  if (c.has("m")) {
    const json& v = c.raw("m");
    if (v.is_string() && v.get<std::string>() == "closed-form") {
      m = erm_sample_bound(1, eps, delta, base);
      m_source = "erm-bound(d=1, log " + std::string(to_string(base)) + ")";
    } else if (v.is_number_unsigned()) {
      m = v.get<std::uint64_t>();
    } else {
      throw ConfigError("'m' must be \"closed-form\" or a nonnegative integer");
    }
  }
  const auto threads = static_cast<unsigned>(c.u64("threads", 1));
  const bool strict = c.boolean("strict", false);

  const PiecewiseUniformDistribution D =
      dist == "uniform" ? PiecewiseUniformDistribution::uniform(Rational(0), Rational(1), c.rational("cutoff", Rational(1, 3)))
                        : concentrated_third_distribution();
  if (dist != "uniform" && c.has("cutoff")) throw ConfigError("'cutoff' applies only to the uniform distribution");
  const auto problem = stump_problem(D);
  const auto en = RationalEnumeration::diagonal();
  std::function<Rational(const Sample<Rational>&)> L;
  if (learner == "a-step") {
    L = [en](const Sample<Rational>& S) { return en.at(stump_proper_learner(S, en)); };
  } else if (learner == "best-in-class") {
    L = [cut = D.cutoff()](const Sample<Rational>&) { return cut; };
  } else {
    L = [q = c.rational("constant", Rational(10))](const Sample<Rational>&) { return q; };
  }
  if (learner != "constant" && c.has("constant")) throw ConfigError("'constant' applies only to the constant learner");

  const PacReport r = pac_validate(L, problem, eps, delta, m, run.trials, run.seed, threads);
  Report rep(run);
  rep.meta("distribution", dist);
  rep.meta("density_bound", D.density_bound().str());
  rep.meta("cutoff", D.cutoff().str());
  rep.meta("learner", learner);
  rep.meta("m", m);
  rep.meta("m_source", m_source);
  rep.meta("trials", run.trials);
  rep.meta("failures", r.failures);
  rep.meta("learner_errors", r.learner_errors);
  rep.meta("failure_rate", r.failure_rate.str());
  rep.meta("decision_rule", strict ? "binomial tail >= 0.01" : "failure_rate <= delta + 3 sqrt(delta (1 - delta) / T)");
  rep.meta("three_sigma_verdict", r.verdict ? "pass" : "fail");
  rep.meta("binomial_verdict", r.strict_verdict ? "pass" : "fail");
  rep.header(pac_row_header());
  for (const auto& row : r.rows) rep.row(pac_row_csv(row));
  return rep.finish(strict ? r.strict_verdict : r.verdict, false);
}

int cmd_halting(const Flags& f) {
  Config c = load_config(f, {"n", "epsilon", "delta", "m", "d", "log_base"});
  Run run = resolve("halting-extract", f, c);
  const std::uint64_t n = f.n.value_or(c.u64("n", 32));
  const Rational eps = c.rational("epsilon", Rational(1, 2));
  const Rational delta = c.rational("delta", Rational(1, 2));
  check_unit(eps, "epsilon");
  check_unit(delta, "delta");
  const auto m = sample_function(c, c.u64("d", 1), log_base(c));
  if (n > run.budget_programs + 1) throw ConfigError("n exceeds the program budget");

  auto hc = halting_presentation(run.budget_programs, run.budget_steps);
  auto P = realizable_or_first(hc.presentation, hc.halting.entries.size());
  const auto bits = extract_halting_prefix(P, m, n, eps, delta, hc);
  const auto table = hc.halting.table(n);
  Report rep(run);
  rep.meta("sample_function", m.label);
  rep.meta("M", m(eps, delta));
  rep.meta("epsilon", eps.str());
  rep.meta("delta", delta.str());
  rep.meta("learner", "least zero-error ideal of the halting-time class, ideal 0 otherwise");
  rep.meta("criterion", "bit_k = [z_k ~ k]");
  rep.meta("bits", bits_str(bits));
  rep.header("program,bit,table_bit,halt_steps");
  for (std::uint64_t k = 0; k < n; ++k) {
    auto s = hc.halting.steps_of(k);
    rep.row(std::to_string(k) + ',' + std::to_string(bits[k]) + ',' + std::to_string(table[k]) + ',' +
            (s ? std::to_string(*s) : ""));
  }
  return rep.finish(bits == table, true);
}

// Programs outside [16] whose runs read the oracle.
std::vector<std::uint64_t> default_oracle_programs() {
  return {
      // halts iff z(0) = 0
      Program{{Instruction::ord(0), Instruction::decjz(0, 3), Instruction::jmp(2)}}.encode(),
      // halts after 3 + 2 z(0) steps
      Program{{Instruction::ord(0), Instruction::decjz(0, 3), Instruction::jmp(1)}}.encode(),
      // halts iff z(z(0)) > 0
      Program{{Instruction::ord(0), Instruction::ord(0), Instruction::decjz(0, 0)}}.encode(),
  };
}

int cmd_jump(const Flags& f) {
  Config c = load_config(f, {"n", "epsilon", "delta", "m", "d", "log_base", "oracles", "oracle_cells", "oracle_values",
                             "extra_programs"});
  Run run = resolve("jump-extract", f, c);
  const std::uint64_t n = f.n.value_or(c.u64("n", 16));
  const Rational eps = c.rational("epsilon", Rational(1, 2));
  const Rational delta = c.rational("delta", Rational(1, 2));
  check_unit(eps, "epsilon");
  check_unit(delta, "delta");
  const auto m = sample_function(c, c.u64("d", 1), log_base(c));
  const std::uint64_t oracles = c.u64("oracles", 3);
  const std::uint64_t cells = c.u64("oracle_cells", 4);
  const std::uint64_t values = c.u64("oracle_values", 3);
  if (cells < 1 || cells > 8 || values < 1 || values > 8) throw ConfigError("oracle_cells and oracle_values must lie in [1, 8]");

  std::vector<std::uint64_t> programs(n);
  for (std::uint64_t e = 0; e < n; ++e) programs[e] = e;
  std::vector<std::uint64_t> extra = c.has("extra_programs") ? c.u64_list("extra_programs") : default_oracle_programs();
  for (auto e : extra) {
    if (std::find(programs.begin(), programs.end(), e) == programs.end()) programs.push_back(e);
  }
  const auto family = oracle_family(cells, values);
  auto cls = oracle_halting_presentation(programs, family, run.budget_steps);
  auto P = realizable_or_first(cls.presentation, cls.ideals.size());

  std::mt19937_64 gen(run.seed);
  Report rep(run);
  rep.meta("sample_function", m.label);
  rep.meta("M", m(eps, delta));
  rep.meta("oracle_family", "support in [0, " + std::to_string(cells) + "), values below " + std::to_string(values));
  rep.meta("ideals", cls.ideals.size());
  rep.meta("extra_programs", join(extra));
  rep.header("oracle_id,oracle,program,bit,jump_bit");
  bool pass = true;
  for (std::uint64_t o = 0; o < oracles; ++o) {
    const OracleTape z = OracleTape::from_sequence(family[uniform_below(gen, family.size())]);
    const auto bits = extract_jump_bits(P, m, z, programs, eps, delta, cls);
    for (std::size_t k = 0; k < programs.size(); ++k) {
      const auto want = jump_bit(z, programs[k], run.budget_steps);
      pass = pass && bits[k] == want;
      rep.row(std::to_string(o) + ',' + join(z.as_sequence()) + ',' + std::to_string(programs[k]) + ',' +
              std::to_string(bits[k]) + ',' + std::to_string(want));
    }
  }
  return rep.finish(pass, true);
}

int cmd_bad(const Flags& f) {
  Config c = load_config(f, {"n", "delta", "density_bound", "k_max"});
  Run run = resolve("bad-sample-fn", f, c);
  const std::uint64_t n = f.n.value_or(c.u64("n", 16));
  const Rational delta = c.rational("delta", Rational(1, 2));
  check_unit(delta, "delta");
  const Rational M = c.rational("density_bound", Rational(4));
  if (M.sign() <= 0) throw ConfigError("density_bound must be positive");
  const std::uint64_t k_max = c.u64("k_max", 20);
  if (n > run.budget_programs + 1) throw ConfigError("n exceeds the program budget");

  const auto halting = enumerate_halting(run.budget_programs, run.budget_steps);
  const auto r = bad_sample_fn_demo(n, delta, halting, M, k_max);
  const auto table = halting.table(n);
  Report rep(run);
  rep.meta("sample_function", "coarsened-stump(budgeted halting), computable only through the budget");
  rep.meta("m_n", r.m_n);
  rep.meta("scanned", r.scanned);
  rep.meta("bits", bits_str(r.bits));
  rep.meta("loss_bound_holds", r.bound_holds ? "true" : "false");
  rep.meta("control_enumeration", "1/2 first");
  rep.meta("control_loss_bound_holds", r.control_bound_holds ? "true" : "false");
  for (std::size_t k = 0; k < r.losses.size(); ++k) {
    rep.meta("loss_k" + std::to_string(r.losses[k].k),
             r.losses[k].loss.str() + " bound " + r.losses[k].bound.str() + " control " + r.control_losses[k].loss.str());
  }
  rep.header("program,bit,table_bit");
  for (std::uint64_t k = 0; k < n; ++k) {
    rep.row(std::to_string(k) + ',' + std::to_string(r.bits[k]) + ',' + std::to_string(table[k]));
  }
  return rep.finish(r.bits == table && r.bound_holds, true);
}

int cmd_reduce(const Flags& f) {
  Config c = load_config(f, {"samples", "max_size", "blocks", "depth", "corrupt_at", "ideal_budget"});
  Run run = resolve("reduce-check", f, c);
  const std::uint64_t count = c.u64("samples", 20);
  const std::uint64_t max_size = c.u64("max_size", 12);
  const std::uint64_t blocks = c.u64("blocks", 64);
  const std::uint64_t depth = c.u64("depth", 32);
  const std::uint64_t corrupt = c.u64("corrupt_at", 3);
  const std::uint64_t budget = c.u64("ideal_budget", 4096);
  if (max_size < 1 || blocks < 2 || depth < 1) throw ConfigError("max_size, blocks, depth out of range");

  auto h = stump_presentation();
  const auto F = staged_erm_target(h, budget);
  const auto K = staged_erm_stage_builder(h);
  Report rep(run);
  rep.meta("target", "realizable ERM on the decoded sample prefix");
  rep.meta("reduction", "K = stage builder, G = lim with stabilization witness, H = identity");
  rep.meta("control", "H corrupts output position " + std::to_string(corrupt));
  rep.header("sample_id,size,witness,inputs,symbols_compared,agree,control_agree,control_position");
  bool pass = true;
  std::uint64_t id = 0;
  for (const auto& item : realizable_stump_corpus(count, max_size, run.seed)) {
    const auto stages = erm_anytime(h, item.sample, blocks);
    const std::uint64_t N = stabilization_index(stages);
    const auto G = lim_oracle([N](unsigned) { return N; });
    std::vector<Name> names;
    for (std::uint64_t b = 2; b <= blocks; b *= 2) names.push_back(stump_sample_name(item.sample, static_cast<unsigned>(b)));
    if (blocks & (blocks - 1)) names.push_back(stump_sample_name(item.sample, static_cast<unsigned>(blocks)));
    const auto ok = check_reduction(F, G, {K, identity_transducer()}, names, depth);
    const auto bad = check_reduction(F, G, {K, corrupt_at(corrupt)}, names, depth);
    const bool detected = !bad.agree && bad.position == std::optional<std::size_t>(corrupt);
    pass = pass && ok.agree && ok.symbols_compared > 0 && detected;
    std::ostringstream row;
    row << id++ << ',' << item.sample.size() << ',' << N << ',' << names.size() << ',' << ok.symbols_compared << ','
        << (ok.agree ? 1 : 0) << ',' << (bad.agree ? 1 : 0) << ',' << (bad.position ? std::to_string(*bad.position) : "");
    rep.row(row.str());
  }
  return rep.finish(pass, false);
}

int cmd_disasm(const Flags& f) {
  Config c = load_config(f, {"program"});
  Run run = resolve("disasm", f, c);
  const std::uint64_t p = f.program.value_or(c.u64("program", 0));
  const Program prog = Program::decode(p);
  Report rep(run);
  rep.meta("program", p);
  rep.meta("instructions", prog.code.size());
  rep.meta("uses_oracle", prog.uses_oracle() ? "true" : "false");
  std::istringstream lines(disassemble(prog));
  for (std::string line; std::getline(lines, line);) rep.row(line);
  return rep.finish(true, false);
}

void error_record(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cpac: computable PAC learning scenarios"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&f](CLI::App* s) {
    s->add_option("--config", f.config, "JSON scenario file");
    s->add_option("--seed", f.seed, "master seed (u64)");
    s->add_option("--out", f.out, "report path (default stdout)");
    s->add_option("--trials", f.trials, "Monte Carlo trials");
    s->add_option("--budget-programs", f.budget_programs, "largest program index simulated");
    s->add_option("--budget-steps", f.budget_steps, "step budget per run");
  };
  struct Cmd {
    const char* name;
    const char* help;
    int (*run)(const Flags&);
  };
  const std::vector<Cmd> cmds{
      {"vc", "shattering and VC lower bounds", cmd_vc},
      {"erm", "ERM learners on a realizable stump corpus", cmd_erm},
      {"stump", "the A_step decision-stump learner", cmd_stump},
      {"pac-validate", "Monte Carlo PAC check", cmd_pac},
      {"halting-extract", "halting bits from a proper learner", cmd_halting},
      {"jump-extract", "jump bits from a proper learner for the oracle class", cmd_jump},
      {"bad-sample-fn", "halting bits from a sample function", cmd_bad},
      {"reduce-check", "staged ERM against a witnessed limit", cmd_reduce},
      {"disasm", "dump a register-machine program", cmd_disasm},
  };
  std::map<CLI::App*, const Cmd*> by_app;
  for (const auto& c : cmds) {
    CLI::App* s = app.add_subcommand(c.name, c.help);
    common(s);
    by_app[s] = &c;
  }
  app.get_subcommand("erm")->add_option("--mode", f.mode, "realizable | anytime | behavior");
  app.get_subcommand("vc")->add_option("--class", f.cls, "stump | halting | apply");
  for (const char* name : {"halting-extract", "jump-extract", "bad-sample-fn"}) {
    app.get_subcommand(name)->add_option("--n", f.n, "prefix length");
  }
  app.get_subcommand("disasm")->add_option("--program", f.program, "program index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_record("ConfigError", e.what());
    return 1;
  }
  for (const auto& [s, c] : by_app) {
    if (!s->parsed()) continue;
    try {
      return c->run(f);
    } catch (const ConfigError& e) {
      error_record("ConfigError", e.what());
      return 1;
    } catch (const Error& e) {
      error_record(e.kind(), e.what());
      return 2;
    } catch (const std::exception& e) {
      error_record("InvalidArgument", e.what());
      return 1;
    }
  }
  return 1;
}
