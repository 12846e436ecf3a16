// rlab_cli: experiment runner over the rlab constructions.
//
// Every subcommand writes <out>.csv and <out>.json (default out: rlab_<cmd>)
// and echoes the JSON summary on stdout. The summary carries a "config"
// object holding every option value; passing the summary back through
// --config replays the run. Exit codes: 2 parse error, 3 precondition
// violation, 4 budget exceeded, 1 anything else.

#include <CLI11.hpp>

#include <rlab/json.hpp>
#include <rlab/rlab.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

using namespace rlab;

namespace {

struct Command {
  CLI::App* app = nullptr;
  std::string name;
  std::map<std::string, std::string> values;  // stable addresses for CLI11
  std::map<std::string, bool> flags;
  std::vector<std::string> order;
  std::function<json(Command&)> run;

  void opt(const std::string& key, const std::string& def, const std::string& help) {
    values[key] = def;
    order.push_back(key);
    app->add_option("--" + key, values[key], help)->capture_default_str();
  }
  void flag(const std::string& key, const std::string& help) {
    flags[key] = false;
    order.push_back(key);
    app->add_flag("--" + key, flags[key], help);
  }
  const std::string& s(const std::string& key) const { return values.at(key); }
  bool has(const std::string& key) const { return !values.at(key).empty(); }
  std::uint64_t u(const std::string& key) const { return parse::to_u64(values.at(key), key.c_str()); }
  Rational q(const std::string& key) const { return Rational::parse(values.at(key)); }
  std::string out() const { return has("out") ? s("out") : "rlab_" + name; }

  json config() const {
    json j;
    j["subcommand"] = name;
    for (const auto& k : order) {
      if (flags.count(k)) j[k] = flags.at(k);
      else j[k] = values.at(k);
    }
    return j;
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Precondition, "cannot write '" + path + "'");
  f << text;
}

// Fixed trace columns: index, partial_sum_num, partial_sum_den, float_approx.
void write_trace_csv(const std::string& path, const PartialSumTrace& tr) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Precondition, "cannot write '" + path + "'");
  f << "index,partial_sum_num,partial_sum_den,float_approx\n";
  for (const auto& c : tr.checkpoints)
    f << c.index << ',' << c.sum.num().get_str() << ',' << c.sum.den().get_str() << ','
      << fmt_double(c.sum.to_double()) << '\n';
}

void write_rows_csv(const std::string& path, const std::string& header,
                    const std::vector<std::string>& rows) {
  std::string text = header + "\n";
  for (const auto& r : rows) text += r + "\n";
  write_text(path, text);
}

ClassifyParams classify_params(const Command& c) {
  ClassifyParams p;
  if (c.has("window")) p.window = c.u("window");
  p.osc_gap = c.q("osc-gap");
  if (c.has("conv-radius")) p.conv_radius = c.q("conv-radius");
  return p;
}

void add_classify_opts(Command& c) {
  c.opt("window", "", "classification window in checkpoints (default: last 10%)");
  c.opt("osc-gap", "1/2", "oscillation gap");
  c.opt("conv-radius", "", "convergence radius (default: 10 |a_horizon|)");
}

parse::PermContext perm_context(const Command& c, index_t horizon) {
  parse::PermContext ctx;
  ctx.series = parse::series(c.s("series"));
  ctx.horizon = horizon;
  if (c.values.count("rounds")) ctx.rounds = c.u("rounds");
  return ctx;
}

json witness_json(const PartialSumTrace& tr) {
  json j = trace_summary(tr);
  if (tr.classification.kind == Behavior::Oscillating) {
    for (const auto& cp : tr.checkpoints) {
      if (cp.index == tr.classification.low_witness) j["low_witness_sum"] = rational_json(cp.sum);
      if (cp.index == tr.classification.high_witness) j["high_witness_sum"] = rational_json(cp.sum);
    }
  }
  return j;
}

json run_rearrange(Command& c) {
  index_t h = c.u("horizon");
  auto ctx = perm_context(c, h);
  auto p = parse::permutation(c.s("perm"), ctx);
  auto tr = partial_sums(ctx.series, p, h, c.u("stride"), classify_params(c));
  write_trace_csv(c.out() + ".csv", tr);
  return witness_json(tr);
}

json run_riemann(Command& c) {
  index_t h = c.u("horizon");
  auto a = parse::series(c.s("series"));
  auto target = parse::riemann_target(c.s("target"));
  auto p = riemann_rearrange(a, target, h);
  auto tr = partial_sums(a, p, h, c.u("stride"), classify_params(c));
  write_trace_csv(c.out() + ".csv", tr);
  json j = witness_json(tr);
  index_t pos = 0, neg = 0;
  for (index_t n = 0; n < h; ++n) (a.approx_at(p(n)).hi >= 0 ? pos : neg)++;
  j["nonnegative_terms"] = pos;
  j["negative_terms"] = neg;
  j["last_term"] = rational_json(a.at(p(h - 1)));
  if (target.kind == RiemannTarget::Kind::Finite)
    j["distance_to_target"] = rational_json((tr.checkpoints.back().sum - target.value).abs());
  return j;
}

json mix_common(Command& c, MixerResult m, const SeriesSpec& a) {
  index_t h = c.u("horizon");
  auto tr = mixer_trace(a, m, h, c.u("stride"), classify_params(c));
  write_trace_csv(c.out() + ".csv", tr);
  json j = witness_json(tr);
  json audit = json::array();
  std::size_t ok = 0;
  for (const auto& ag : m.agreements()) {
    if (ag.index >= h) continue;
    PermutationProg t = ag.target == 1 ? m.state->odd : m.state->even;
    bool v = set_prefix_agrees(m.q, t, ag.index);
    ok += v;
    audit.push_back({{"stage", ag.stage},
                     {"target", ag.target == 1 ? m.state->odd_label : m.state->even_label},
                     {"index", ag.index},
                     {"verified", v}});
  }
  j["agreements"] = audit;
  j["agreements_verified"] = ok;
  j["stages_run"] = m.state->stages;
  return j;
}

json run_mix(Command& c) {
  auto ctx = perm_context(c, 1);
  auto p = parse::permutation(c.s("perm"), ctx);
  return mix_common(c, mixer(p, c.u("rounds")), ctx.series);
}

json run_mix2(Command& c) {
  auto ctx = perm_context(c, 1);
  auto p1 = parse::permutation(c.s("perm"), ctx);
  auto p2 = parse::permutation(c.s("perm2"), ctx);
  return mix_common(c, mixer2(p1, p2, c.u("rounds")), ctx.series);
}

GrowthFunction growth_for(const std::string& spec, PermutationProg p) {
  if (spec == "dominating") return dominating_f_for({p}, DominationMode::everywhere());
  if (parse::starts_with(spec, "dominating-io:"))
    return dominating_f_for({p}, DominationMode::infinitely_often(parse::to_u64(spec.substr(14), "stride")));
  return parse::growth(spec);
}

json run_pad(Command& c) {
  auto ctx = perm_context(c, 1);
  auto p = parse::permutation(c.s("perm"), ctx);
  auto f = growth_for(c.s("f"), p);
  std::size_t levels = c.u("levels");
  auto audit = padding_audit(ctx.series, f, p, levels);
  PartialSumTrace tr;
  json rows = json::array();
  for (const auto& l : audit.levels) {
    tr.checkpoints.push_back({l.position + 1, l.permuted_sum});
    rows.push_back({{"m", l.m},
                    {"orbit_point", l.orbit_point},
                    {"position", l.position},
                    {"permuted_sum", rational_json(l.permuted_sum)},
                    {"original_sum", rational_json(l.original_sum)},
                    {"equal", l.equal}});
  }
  tr.horizon = tr.checkpoints.empty() ? 0 : tr.checkpoints.back().index;
  write_trace_csv(c.out() + ".csv", tr);
  json j;
  j["f"] = f.name();
  j["levels"] = rows;
  j["all_equal"] = audit.all_equal();
  j["inversions"] = audit.inversions;
  if (audit.last_inversion) j["last_inversion"] = *audit.last_inversion;
  if (parse::starts_with(c.s("f"), "dominating-io:")) {
    json io = json::array();
    for (const auto& k : io_checkpoints(ctx.series, f, p, c.u("io-range"))) {
      json e = {{"n", k.n}, {"orbit_n", k.orbit_n}, {"g", k.g_value}, {"orbit_n2", k.orbit_n2},
                {"position", k.position}, {"permuted_sum", rational_json(k.permuted_sum)}};
      if (k.matched_j) e["within_next_term_of_S_j"] = *k.matched_j;
      io.push_back(e);
    }
    j["io_checkpoints"] = io;
  }
  return j;
}

json run_gbound(Command& c) {
  auto ctx = perm_context(c, 1);
  auto p = parse::permutation(c.s("perm"), ctx);
  BoundFunction g(p);
  index_t upto = c.u("n");
  std::vector<std::string> rows;
  json vals = json::array();
  for (index_t n = 0; n <= upto; ++n) {
    rows.push_back(std::to_string(n) + "," + std::to_string(g.reach(n)) + "," + std::to_string(g(n)));
    vals.push_back({{"n", n}, {"a", g.reach(n)}, {"g", g(n)}});
  }
  // p(i) <= n and p(j) >= g(n) must force i <= j.
  index_t range = c.u("check-range");
  std::uint64_t bad = 0;
  for (index_t n = 0; n <= upto; ++n)
    for (index_t i = 0; i <= range; ++i)
      for (index_t k = 0; k <= range; ++k)
        if (p(i) <= n && p(k) >= g(n) && i > k) ++bad;
  write_rows_csv(c.out() + ".csv", "n,a,g", rows);
  json j;
  j["values"] = vals;
  j["counterexamples"] = bad;
  return j;
}

json game_rows(const Predictor& P, const std::vector<Value>& xs, index_t h, const std::string& csv) {
  auto rep = play_game(P, xs, h);
  std::vector<std::string> rows;
  for (index_t n : rep.d_points) {
    auto g = P.pi(n, Prefix(xs.data(), n));
    rows.push_back(std::to_string(n) + "," + (g ? std::to_string(*g) : "undefined") + "," +
                   std::to_string(xs[n]) + "," + (g && *g == xs[n] ? "1" : "0"));
  }
  write_rows_csv(csv, "index,prediction,actual,match", rows);
  return to_json(rep);
}

json run_predict(Command& c) {
  index_t h = c.u("horizon");
  auto P = parse::predictor(c.s("pred"));
  auto xs = parse::sequence(c.s("x"), h);
  json j = game_rows(P, xs, h, c.out() + ".csv");
  j["predictor"] = P.name;
  return j;
}

json run_evade(Command& c) {
  index_t h = c.u("horizon");
  std::vector<Predictor> preds;
  for (const auto& tok : parse::split(c.s("pred"), ';')) preds.push_back(parse::predictor(tok));
  std::string mode = c.s("mode");
  if (mode.empty()) mode = preds.size() == 1 ? "dominator" : "family";
  std::vector<Value> xs;
  if (mode == "dominator") {
    if (preds.size() != 1) throw Error(ErrorKind::Precondition, "dominator mode takes one predictor");
    xs = evader_from_dominator(preds[0], h, std::nullopt, c.u("enum-budget"));
  } else if (mode == "family") {
    xs = evader_against_family(preds, h);
  } else {
    throw Error(ErrorKind::Parse, "mode is dominator or family");
  }
  std::vector<std::string> rows;
  for (index_t n = 0; n < h; ++n) rows.push_back(std::to_string(n) + "," + std::to_string(xs[n]));
  write_rows_csv(c.out() + ".csv", "index,x", rows);
  json j;
  j["mode"] = mode;
  json games = json::array();
  for (std::size_t e = 0; e < preds.size(); ++e) {
    auto rep = play_game(preds[e], xs, h);
    // Family mode only obliges x against P_e from index e on.
    std::size_t due = 0, hit = 0;
    std::set<index_t> mis(rep.mismatches.begin(), rep.mismatches.end());
    for (index_t n : rep.d_points)
      if (mode == "dominator" || n >= e) {
        ++due;
        hit += mis.count(n);
      }
    json g = to_json(rep);
    g["predictor"] = preds[e].name;
    g["evaded_every_opportunity"] = due == hit;
    games.push_back(g);
  }
  j["games"] = games;
  return j;
}

json run_trace_pred(Command& c) {
  Trace T = parse::trace_file(c.s("trace"));
  auto audits = audit_trace(T);
  Predictor P = trace_predictor(T);
  std::vector<std::string> rows;
  json blocks = json::array();
  std::uint64_t wrong = 0;
  for (const auto& a : audits) {
    // Each member, read as the block content of some x, must be predicted at j.
    const auto& members = T.blocks.at(a.n);
    index_t b = Trace::block_start(a.n);
    for (const auto& m : members) {
      std::vector<Value> x(b + a.n, 0);
      std::copy(m.begin(), m.end(), x.begin() + static_cast<std::ptrdiff_t>(b));
      auto g = P.pi(a.j_global, Prefix(x.data(), a.j_global));
      if (!g || *g != m[a.j_block]) ++wrong;
    }
    std::string fd;
    for (index_t i : a.first_differences) fd += (fd.empty() ? "" : " ") + std::to_string(i);
    rows.push_back(std::to_string(a.n) + "," + std::to_string(a.j_block) + "," +
                   std::to_string(a.j_global) + "," + fd);
    blocks.push_back({{"n", a.n}, {"first_differences", a.first_differences},
                      {"j_block", a.j_block}, {"j_global", a.j_global}});
  }
  write_rows_csv(c.out() + ".csv", "n,j_block,j_global,first_differences", rows);
  json j;
  j["alphabet"] = T.alphabet;
  j["blocks"] = blocks;
  j["member_mispredictions"] = wrong;
  if (c.has("x")) {
    index_t h = Trace::block_start(T.max_block() + 1);
    auto xs = parse::sequence(c.s("x"), h);
    j["game"] = to_json(play_game(P, xs, h));
  }
  return j;
}

json run_meager(Command& c) {
  json j;
  index_t h = c.u("horizon");
  bool any = false;
  if (c.has("pred")) {
    any = true;
    auto P = parse::predictor(c.s("pred"));
    auto xs = parse::sequence(c.s("x"), h);
    auto v = meager_layer_Ci(P, c.u("i"), xs, h);
    j["C_i"] = {{"i", c.u("i")}, {"member", v.member}, {"mismatches", v.mismatches}};
  }
  if (c.has("perm")) {
    any = true;
    auto ctx = perm_context(c, h);
    auto p = parse::permutation(c.s("perm"), ctx);
    Rational k = c.q("k");
    auto v = escape_layer_Ek(ctx.series, k, p, h);
    auto tr = partial_sums(ctx.series, p, h, c.u("stride"));
    write_trace_csv(c.out() + ".csv", tr);
    json e = {{"k", k.to_string()}, {"member", v.member}, {"checked_from", v.checked_from}};
    if (v.first_exit) e["first_exit"] = *v.first_exit;
    e["escape_length"] = v.escape.size();
    if (v.escape_sum) e["escape_sum"] = rational_json(*v.escape_sum);
    j["E_k"] = e;
  } else {
    write_rows_csv(c.out() + ".csv", "index,partial_sum_num,partial_sum_den,float_approx", {});
  }
  if (!any) throw Error(ErrorKind::Precondition, "meager needs --pred/--x or --perm");
  return j;
}

std::vector<Rational> parse_variances(const std::string& spec) {
  std::vector<Rational> v;
  if (parse::starts_with(spec, "geometric:")) {
    auto parts = parse::split(spec.substr(10), ',');
    if (parts.size() != 2) throw Error(ErrorKind::Parse, "geometric:<ratio>,<count>");
    Rational r = Rational::parse(parts[0]), cur(1);
    for (std::uint64_t i = 0, n = parse::to_u64(parts[1], "count"); i < n; ++i, cur *= r) v.push_back(cur);
    return v;
  }
  for (const auto& tok : parse::split(spec, ',')) v.push_back(Rational::parse(tok));
  return v;
}

json run_kolmogorov(Command& c) {
  auto vars = parse_variances(c.s("variances"));
  Rational eps = c.q("epsilon");
  bool exact = c.flags.at("exact");
  auto r = kolmogorov_check(vars, eps, c.u("trials"), c.u("seed"), exact);
  json inputs = {{"variances", c.s("variances")}, {"epsilon", eps.to_string()},
                 {"generator", SignSequence::kGeneratorId}};
  json j = report_json(r, inputs);
  write_rows_csv(c.out() + ".csv", "estimate,bound,slack,pass",
                 {fmt_double(r.estimate) + "," + fmt_double(r.bound) + "," + fmt_double(r.slack) + "," +
                  (r.pass ? "1" : "0")});
  return j;
}

json run_thresholds(Command& c) {
  auto a = parse::series(c.s("series"));
  auto name = compute_thresholds(a, c.u("levels"));
  std::vector<std::string> rows;
  json lv = json::array();
  for (std::size_t m = 0; m < name.levels(); ++m) {
    const auto& tb = name.tail_bounds[m];
    rows.push_back(std::to_string(m) + "," + std::to_string(name.thresholds[m]) + "," +
                   tb.value.to_string() + "," + (tb.strict ? "1" : "0"));
    lv.push_back({{"m", m}, {"i_m", name.thresholds[m]}, {"tail_bound", tb.value.to_string()},
                  {"strict", tb.strict}});
  }
  write_rows_csv(c.out() + ".csv", "m,i_m,tail_bound,strict", rows);
  json j;
  j["levels"] = lv;
  j["sound"] = thresholds_sound(name);
  std::uint64_t trials = c.u("dmeas-trials");
  if (trials > 0) {
    json d = json::array();
    for (std::size_t m = 0; m + 1 < name.levels(); ++m) {
      auto r = dmeas_pair_check(name, SignSequence(c.u("seed")), m + 1, m, trials);
      d.push_back(report_json(r, {{"j", m + 1}, {"m", m}, {"generator", SignSequence::kGeneratorId}}));
    }
    j["dmeas"] = d;
  }
  return j;
}

json run_rademacher(Command& c) {
  auto mags = parse::series(c.s("series"));
  std::optional<PermutationProg> perm;
  if (c.has("perm")) perm = parse::permutation(c.s("perm"), perm_context(c, 1));
  auto r = rademacher_convergence_experiment(mags, c.u("seeds"), c.u("h1"), c.u("h2"), c.q("tolerance"),
                                             perm, c.u("seed"));
  std::vector<std::string> rows;
  for (std::size_t k = 0; k < r.drift.size(); ++k)
    rows.push_back(std::to_string(r.base_seed + k) + "," + fmt_double(r.drift[k]) + "," +
                   (r.drift[k] <= r.tolerance ? "1" : "0"));
  write_rows_csv(c.out() + ".csv", "seed,drift,pass", rows);
  json inputs = {{"series", c.s("series")}, {"perm", c.s("perm")}, {"h1", r.h1}, {"h2", r.h2},
                 {"tolerance", c.s("tolerance")}, {"generator", SignSequence::kGeneratorId}};
  return report_json(r, inputs);
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return 2;
    case ErrorKind::BudgetExceeded:
    case ErrorKind::SearchBudgetExceeded: return 4;
    default: return 3;
  }
}

// Splices --config <file> into argv: the file's keys become trailing
// "--key value" pairs, which override flags because every option keeps its
// last value.
std::vector<std::string> expand_config(std::vector<std::string> args,
                                       const std::set<std::string>& subcommands,
                                       const std::map<std::string, std::set<std::string>>& flag_names) {
  auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return args;
  if (it + 1 == args.end()) throw Error(ErrorKind::Parse, "--config needs a file");
  std::string path = *(it + 1);
  args.erase(it, it + 2);
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open config '" + path + "'");
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Parse, std::string("config is not JSON: ") + e.what());
  }
  if (cfg.contains("config") && cfg["config"].is_object()) cfg = cfg["config"];
  if (!cfg.is_object()) throw Error(ErrorKind::Parse, "config must be a JSON object");
  std::string sub;
  for (std::size_t i = 1; i < args.size() && sub.empty(); ++i)
    if (subcommands.count(args[i])) sub = args[i];
  if (cfg.contains("subcommand")) {
    std::string want = cfg["subcommand"].get<std::string>();
    if (sub.empty()) {
      args.insert(args.begin() + 1, want);
      sub = want;
    } else if (sub != want) {
      throw Error(ErrorKind::Parse, "config is for '" + want + "', not '" + sub + "'");
    }
  }
  if (sub.empty() || !subcommands.count(sub)) throw Error(ErrorKind::Parse, "no valid subcommand given");
  const auto& flags = flag_names.at(sub);
  std::vector<std::string> extra;
  for (const auto& [k, v] : cfg.items()) {
    if (k == "subcommand") continue;
    if (flags.count(k)) {
      if (v.is_boolean() ? v.get<bool>() : v.dump() == "\"true\"") extra.push_back("--" + k);
      continue;
    }
    extra.push_back("--" + k);
    extra.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rlab: series rearrangement, prediction games and tail-bound experiments"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::vector<Command> cmds;
  cmds.reserve(16);
  auto add = [&](const std::string& name, const std::string& help,
                 std::function<json(Command&)> run) -> Command& {
    cmds.emplace_back();
    Command& c = cmds.back();
    c.name = name;
    c.app = app.add_subcommand(name, help);
    c.run = std::move(run);
    c.opt("out", "", "output prefix for .csv and .json (default rlab_<command>)");
    return c;
  };

  {
    auto& c = add("rearrange", "exact partial sums of a permuted series", run_rearrange);
    c.opt("series", "alt-harmonic", "series spec");
    c.opt("perm", "identity", "permutation spec");
    c.opt("horizon", "100000", "number of terms");
    c.opt("stride", "1000", "checkpoint stride");
    c.opt("rounds", "10", "mixer rounds for mix: permutations");
    add_classify_opts(c);
  }
  {
    auto& c = add("riemann", "greedy rearrangement towards a target", run_riemann);
    c.opt("series", "alt-harmonic", "series spec");
    c.opt("target", "plus-inf", "plus-inf | minus-inf | rational, optional @hold,slope");
    c.opt("horizon", "100000", "number of terms");
    c.opt("stride", "1000", "checkpoint stride");
    add_classify_opts(c);
  }
  for (const char* name : {"mix", "mix2"}) {
    bool two = std::string(name) == "mix2";
    auto& c = add(name, two ? "mixer of two permutations" : "mixer of a permutation with the identity",
                  two ? run_mix2 : run_mix);
    c.opt("series", "alt-harmonic", "series spec");
    c.opt("perm", two ? "identity" : "riemann:plus-inf", two ? "first permutation (even stages)" : "permutation spec");
    if (two) c.opt("perm2", "riemann:plus-inf", "second permutation (odd stages)");
    c.opt("rounds", "10", "eager rounds; later stages run on demand");
    c.opt("horizon", "1000000", "number of terms");
    c.opt("stride", "5000", "checkpoint stride");
    add_classify_opts(c);
  }
  {
    auto& c = add("pad", "padding invariance report", run_pad);
    c.opt("series", "alt-harmonic", "base series a");
    c.opt("perm", "swap-pairs", "permutation spec");
    c.opt("f", "dominating", "dominating | dominating-io:<stride> | linear:<a>,<b>");
    c.opt("levels", "12", "orbit levels m to check");
    c.opt("io-range", "12", "orbit indices scanned for io checkpoints");
  }
  {
    auto& c = add("gbound", "bound function g of a permutation", run_gbound);
    c.opt("series", "alt-harmonic", "series for riemann permutations");
    c.opt("perm", "swap-pairs", "permutation spec");
    c.opt("n", "20", "largest n");
    c.opt("check-range", "20", "i, j range for the ordering property");
  }
  {
    auto& c = add("predict", "play a prediction game", run_predict);
    c.opt("pred", "zero", "predictor spec");
    c.opt("x", "zero", "sequence spec");
    c.opt("horizon", "100", "game length");
  }
  {
    auto& c = add("evade", "build an evader and replay the games", run_evade);
    c.opt("pred", "lib:n", "predictor spec, or several separated by ';'");
    c.opt("mode", "", "dominator | family (default by predictor count)");
    c.opt("horizon", "100", "length of x");
    c.opt("enum-budget", std::to_string(default_budget()), "prefix enumeration budget");
  }
  {
    auto& c = add("trace-pred", "audit the predictor of a trace file", run_trace_pred);
    c.opt("trace", "", "trace file");
    c.opt("x", "", "optional sequence to play against");
    c.app->get_option("--trace")->required();
  }
  {
    auto& c = add("meager", "C_i and E_k layer verdicts", run_meager);
    c.opt("pred", "", "predictor spec (C_i)");
    c.opt("x", "zero", "sequence spec (C_i)");
    c.opt("i", "1", "layer index i (C_i)");
    c.opt("series", "alt-harmonic", "series spec (E_k)");
    c.opt("perm", "", "permutation spec (E_k)");
    c.opt("k", "1", "bound k (E_k)");
    c.opt("horizon", "1000", "horizon");
    c.opt("stride", "100", "checkpoint stride (E_k trace)");
  }
  {
    auto& c = add("kolmogorov", "maximal inequality check", run_kolmogorov);
    c.opt("variances", "geometric:1/4,10", "comma list or geometric:<ratio>,<count>");
    c.opt("epsilon", "4", "epsilon");
    c.opt("trials", "100000", "Monte Carlo trials");
    c.opt("seed", "1", "seed");
    c.flag("exact", "enumerate all sign patterns instead of sampling");
  }
  {
    auto& c = add("thresholds", "tail thresholds i_m", run_thresholds);
    c.opt("series", "harmonic", "series with a tail oracle");
    c.opt("levels", "5", "number of levels");
    c.opt("dmeas-trials", "0", "trials for d_meas checks between consecutive levels (0: skip)");
    c.opt("seed", "1", "seed for d_meas checks");
  }
  {
    auto& c = add("rademacher", "random-sign convergence experiment", run_rademacher);
    c.opt("series", "harmonic", "magnitudes");
    c.opt("seeds", "100", "number of seeds");
    c.opt("seed", "0", "first seed");
    c.opt("h1", "10000", "first horizon");
    c.opt("h2", "1000000", "second horizon");
    c.opt("tolerance", "1/20", "allowed drift");
    c.opt("perm", "", "optional permutation spec");
    c.opt("rounds", "10", "mixer rounds for mix: permutations");
  }

  std::set<std::string> subnames;
  std::map<std::string, std::set<std::string>> flag_names;
  for (const auto& c : cmds) {
    subnames.insert(c.name);
    for (const auto& [k, _] : c.flags) flag_names[c.name].insert(k);
    flag_names[c.name];
  }

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(args, subnames, flag_names);
  } catch (const Error& e) {
    std::cerr << "rlab_cli: " << e.what() << "\n";
    return 2;
  }
  std::vector<const char*> cargs;
  for (const auto& s : args) cargs.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  for (auto& c : cmds) {
    if (!c.app->parsed()) continue;
    try {
      json result = c.run(c);
      json summary;
      summary["subcommand"] = c.name;
      summary["config"] = c.config();
      summary["result"] = result;
      std::string text = summary.dump(2) + "\n";
      write_text(c.out() + ".json", text);
      std::cout << text;
      return 0;
    } catch (const Error& e) {
      std::cerr << "rlab_cli " << c.name << ": " << e.what() << "\n";
      return exit_code(e.kind());
    } catch (const std::exception& e) {
      std::cerr << "rlab_cli " << c.name << ": " << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}
