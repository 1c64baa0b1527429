// Command-line front end: lock, attack, metrics, simulate, workload, generate.
#include "saslab/attacks.hpp"
#include "saslab/circuits.hpp"
#include "saslab/errors.hpp"
#include "saslab/io.hpp"
#include "saslab/locking.hpp"
#include "saslab/metrics.hpp"
#include "saslab/netlist.hpp"
#include "saslab/workload.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cmath>
#include <iostream>
#include <sstream>
#include <optional>
#include <string>
#include <vector>

using namespace saslab;

namespace {

constexpr const char *kVersion = "1.0.0";

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kSpec = 3, kInternal = 4 };

struct UsageError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

struct Options {
	std::string bench, oracle, scheme, spec, key, out, key_out, spec_out, dump_cnf, branching = "inputs-first";
	std::string wire, minterm, assign, inputs_hex;
	std::vector<std::string> traces;
	std::string weights;
	std::uint64_t seed = 0;
	unsigned threads = 1;
	std::uint64_t iter_limit = 1'000'000;
	std::uint64_t sample = 0;
	std::uint64_t trials = 10'000;
	double time_limit = 0;
	unsigned n = 0, m = 0, l = 1, width = 0, a_bits = 4, b_bits = 4;
	bool full_inputs = false;
	bool seed_given = false;
};

std::uint64_t require_seed(const Options &o)
{
	if (!o.seed_given)
		throw UsageError("--seed is required for this command");
	return o.seed;
}

void require(const std::string &value, const char *flag)
{
	if (value.empty())
		throw UsageError(std::string(flag) + " is required");
}

Scheme scheme_from(const std::string &text)
{
	auto s = parse_scheme(text);
	if (!s)
		throw UsageError("unknown scheme '" + text + "' (sas, rsas, antisat, sfll-flex)");
	return *s;
}

std::vector<std::string> slice_from_spec(const Options &o, const Circuit &c)
{
	SpecDocument doc = load_spec(o.spec, o.seed_given ? std::optional(o.seed) : std::optional<std::uint64_t>(0));
	return std::visit(
		[&](auto spec) {
			if (spec.input_slice.empty()) {
				// Default slice: first n primary inputs; key inputs sit after them.
				if (c.inputs().size() < spec.n)
					throw SpecError("circuit has fewer than n inputs");
				spec.input_slice.assign(c.inputs().begin(), c.inputs().begin() + spec.n);
			}
			return spec.input_slice;
		},
		doc.spec);
}

InputDomain input_domain(const Options &o, const Circuit &locked)
{
	if (!o.spec.empty() && !o.full_inputs)
		return InputDomain{slice_from_spec(o, locked)};
	return full_input_domain(locked);
}

Json spec_summary(Scheme scheme, const std::variant<SasSpec, SfllSpec> &spec)
{
	Json j;
	j["scheme"] = std::string(to_string(scheme));
	if (const auto *s = std::get_if<SasSpec>(&spec)) {
		j["n"] = s->n;
		j["m"] = s->m;
		j["l"] = s->l;
		j["x_g"] = minterm_to_hex(s->x_g, s->n);
		Json crit = Json::array();
		for (Minterm x : s->critical_minterms())
			crit.push_back(minterm_to_hex(x, s->n));
		j["critical_minterms"] = crit;
		j["insertion_wires"] = s->insertion_wires;
		j["input_slice"] = s->input_slice;
	} else {
		const auto &f = std::get<SfllSpec>(spec);
		j["n"] = f.n;
		j["c"] = f.c;
		j["k"] = f.k;
		j["insertion_wire"] = f.insertion_wire;
		j["input_slice"] = f.input_slice;
	}
	return j;
}

Json cmd_lock(const Options &o)
{
	require(o.bench, "--bench");
	require(o.spec, "--spec");
	require(o.out, "--out");
	std::uint64_t seed = require_seed(o);
	Circuit c = read_bench_file(o.bench);
	SpecDocument doc = load_spec(o.spec, seed);
	std::optional<Scheme> scheme;
	if (!o.scheme.empty())
		scheme = scheme_from(o.scheme);
	// The flag wins over the file's "scheme"; the spec shape is checked below.
	if (!scheme)
		scheme = doc.scheme;
	if (!scheme)
		throw UsageError("--scheme is required when the spec file has no \"scheme\"");
	LockedCircuit locked;
	switch (*scheme) {
	case Scheme::SfllFlex:
		if (!std::holds_alternative<SfllSpec>(doc.spec))
			throw SpecError("sfll-flex needs a spec with cubes");
		locked = lock_sfll_flex(c, std::get<SfllSpec>(doc.spec), seed);
		break;
	case Scheme::Sas:
	case Scheme::Rsas:
	case Scheme::AntiSat: {
		if (!std::holds_alternative<SasSpec>(doc.spec))
			throw SpecError(std::string(to_string(*scheme)) + " needs a SAS-style spec");
		const SasSpec &s = std::get<SasSpec>(doc.spec);
		locked = *scheme == Scheme::Sas ? lock_sas(c, s, seed)
		         : *scheme == Scheme::Rsas ? lock_rsas(c, s, seed)
		                                   : lock_antisat(c, s, seed);
		break;
	}
	}
	write_text_file(o.out, emit_bench(locked.circuit));
	if (!o.key_out.empty())
		write_text_file(o.key_out, format_key(locked.correct_key) + "\n");
	if (!o.spec_out.empty())
		write_text_file(o.spec_out, to_json(locked.scheme, locked.spec).dump(2) + "\n");
	Json r;
	r["spec"] = spec_summary(locked.scheme, locked.spec);
	r["bench_out"] = o.out;
	if (!o.key_out.empty())
		r["key_out"] = o.key_out;
	r["key_bits"] = locked.correct_key.size();
	r["correct_key"] = format_key(locked.correct_key);
	r["inputs"] = locked.circuit.inputs().size();
	r["outputs"] = locked.circuit.outputs().size();
	r["gates"] = locked.circuit.gates().size();
	return r;
}

Circuit oracle_circuit(const Options &o, const Circuit &locked)
{
	if (!o.oracle.empty())
		return read_bench_file(o.oracle);
	if (!o.key.empty())
		return bind_key(locked, load_key(o.key, key_input_names(locked).size()));
	throw UsageError("--oracle (or --key for the activated locked circuit) is required");
}

AttackOptions attack_options(const Options &o)
{
	AttackOptions a;
	a.iteration_limit = o.iter_limit;
	a.time_limit = o.time_limit;
	a.seed = require_seed(o);
	a.dump_cnf_dir = o.dump_cnf;
	auto b = parse_branching(o.branching);
	if (!b)
		throw UsageError("unknown branching '" + o.branching + "' (vsids, inputs-first)");
	a.branching = *b;
	return a;
}

Json cmd_attack_sat(const Options &o, double &wall)
{
	require(o.bench, "--bench");
	Circuit locked = read_bench_file(o.bench);
	Oracle oracle(oracle_circuit(o, locked));
	AttackResult res = sat_attack(locked, oracle, attack_options(o));
	wall = res.wall_seconds;
	Json r = to_json(res);
	if (res.termination == Termination::Exhausted) {
		// The returned key must make the circuit equivalent to the oracle.
		auto eq = check_equivalence(bind_key(locked, res.recovered_key), oracle.circuit(), EquivalenceMode::Sat);
		r["functionally_correct"] = eq.equal;
		if (!eq.equal)
			throw EngineError("exhausted SAT attack returned a key that fails equivalence");
	} else
		r["functionally_correct"] = nullptr;
	return r;
}

Json cmd_attack_approx(const Options &o, double &wall)
{
	require(o.bench, "--bench");
	if (o.sample == 0)
		throw UsageError("--sample is required for approx mode");
	Circuit locked = read_bench_file(o.bench);
	Oracle oracle(oracle_circuit(o, locked));
	auto opts = attack_options(o);
	auto res = approximate_sat_attack(locked, oracle, o.iter_limit, o.sample, opts.seed, opts);
	wall = res.attack.wall_seconds;
	Json r = to_json(res.attack);
	r["error_estimate"] = to_json(res.error);
	return r;
}

Json cmd_attack_removal(const Options &o)
{
	require(o.bench, "--bench");
	Circuit locked = read_bench_file(o.bench);
	Circuit original = oracle_circuit(o, locked);
	Json r;
	Json cands = Json::array();
	for (const auto &cand : removal_candidates(locked))
		cands.push_back({{"wire", cand.wire}, {"skew", cand.skew}});
	r["candidates"] = cands;
	auto res = removal_attack(locked, o.wire.empty() ? std::nullopt : std::optional(o.wire));
	r["removed_wires"] = res.removed_wires;
	r["remaining_key_inputs"] = key_input_names(res.circuit).size();
	if (!key_input_names(res.circuit).empty()) {
		r["equivalent"] = false;
		return r;
	}
	InputDomain dom = input_domain(o, locked);
	if (dom.width() <= kMaxExhaustiveInputBits) {
		auto mism = corrupted_set(res.circuit, original, BitVector(), dom);
		r["domain"] = dom.inputs;
		Json list = Json::array();
		for (Minterm x : mism)
			list.push_back(minterm_to_hex(x, dom.width()));
		r["mismatch_minterms"] = list;
		r["equivalent"] = mism.empty() && (o.spec.empty() || o.full_inputs)
		                      ? true
		                      : check_equivalence(res.circuit, original, EquivalenceMode::Sat).equal;
	} else
		r["equivalent"] = check_equivalence(res.circuit, original, EquivalenceMode::Sat).equal;
	if (!o.out.empty())
		write_text_file(o.out, emit_bench(res.circuit));
	return r;
}

Json cmd_attack_model(const Options &o)
{
	require(o.spec, "--spec");
	std::uint64_t seed = require_seed(o);
	SpecDocument doc = load_spec(o.spec, seed);
	Json r;
	if (const auto *s = std::get_if<SasSpec>(&doc.spec)) {
		if (s->is_antisat())
			throw SpecError("model mode needs a SAS/RSAS spec or a SFLL-flex spec");
		IterationStats st = model_attack_sim(*s, o.trials, seed, o.threads);
		r["stats"] = to_json(st);
		Rational expected = expected_iterations(*s);
		r["formula_mean"] = to_json(expected);
		r["formula_mean_value"] = to_double(expected);
		r["within_3se"] = std::abs(st.mean - to_double(expected)) <= 3 * st.std_error;
		Rational gamma = sas_gamma(s->n, s->m, s->l);
		r["gamma"] = to_json(gamma);
		r["tradeoff_bound_holds"] = tradeoff_check(gamma, st.mean);
	} else {
		IterationStats st = model_attack_sim(std::get<SfllSpec>(doc.spec), o.trials, seed, o.threads);
		r["stats"] = to_json(st);
	}
	return r;
}

KeyDomain key_domain(const Circuit &locked)
{
	return full_key_domain(key_input_names(locked).size());
}

bool exhaustive_ok(const InputDomain &d, const KeyDomain &k)
{
	return d.width() <= kMaxExhaustiveInputBits && k.bits.size() <= kMaxExhaustiveKeyBits;
}

Json cmd_metrics_ker(const Options &o)
{
	require(o.bench, "--bench");
	require(o.key, "--key");
	Circuit locked = read_bench_file(o.bench);
	Circuit original = read_bench_file((require(o.oracle, "--oracle"), o.oracle));
	InputDomain dom = input_domain(o, locked);
	BitVector key = load_key(o.key, key_input_names(locked).size());
	Json r;
	r["key"] = format_key(key);
	r["domain"] = dom.inputs;
	if (o.sample > 0) {
		r["mode"] = "sampled";
		r["ker"] = to_json(ker_sampled(locked, original, key, dom, o.sample, require_seed(o)));
	} else {
		if (dom.width() > kMaxExhaustiveInputBits)
			throw LimitError("input domain too wide for exhaustive KER; pass --sample");
		r["mode"] = "exhaustive";
		auto set = corrupted_set(locked, original, key, dom);
		r["ker"] = to_json(Rational(set.size()) / Rational(std::uint64_t{1} << dom.width()));
		r["corrupted_count"] = set.size();
	}
	return r;
}

Json cmd_metrics_ier(const Options &o)
{
	require(o.bench, "--bench");
	require(o.oracle, "--oracle");
	Circuit locked = read_bench_file(o.bench);
	Circuit original = read_bench_file(o.oracle);
	InputDomain dom = input_domain(o, locked);
	KeyDomain keys = key_domain(locked);
	Json r;
	r["domain"] = dom.inputs;
	if (o.sample > 0) {
		require(o.minterm, "--minterm");
		Minterm x = minterm_from_hex(o.minterm, dom.width());
		std::optional<BitVector> correct;
		if (!o.key.empty())
			correct = load_key(o.key, keys.base.size());
		// Draws that match the supplied correct key on the whole domain are redrawn.
		auto is_correct = [&](const BitVector &k) {
			if (!correct)
				return false;
			return corrupted_set(locked, original, k, dom).empty();
		};
		if (dom.width() > kMaxExhaustiveInputBits && correct)
			throw LimitError("sampled IER with --key needs an input domain of at most 20 bits");
		r["mode"] = "sampled";
		r["minterm"] = minterm_to_hex(x, dom.width());
		r["ier"] = to_json(ier_sampled(locked, original, x, dom, keys, is_correct, o.sample, require_seed(o)));
		return r;
	}
	if (!exhaustive_ok(dom, keys))
		throw LimitError("key space too large for exhaustive IER; pass --sample");
	r["mode"] = "exhaustive";
	ErrorProfile p = error_profile(locked, original, dom, keys, SweepOptions{o.threads});
	if (!o.out.empty())
		write_text_file(o.out, ier_csv(p));
	if (!o.minterm.empty()) {
		Minterm x = minterm_from_hex(o.minterm, dom.width());
		r["minterm"] = minterm_to_hex(x, dom.width());
		r["ier"] = to_json(p.ier(x));
	} else {
		Json table = Json::array();
		for (Minterm x = 0; x < p.minterm_count(); ++x)
			table.push_back({{"minterm", minterm_to_hex(x, dom.width())}, {"ier", to_json(p.ier(x))}});
		r["ier"] = table;
	}
	r["wrong_keys"] = p.wrong_keys;
	return r;
}

Json cmd_metrics_averages(const Options &o)
{
	require(o.bench, "--bench");
	require(o.oracle, "--oracle");
	Circuit locked = read_bench_file(o.bench);
	Circuit original = read_bench_file(o.oracle);
	InputDomain dom = input_domain(o, locked);
	KeyDomain keys = key_domain(locked);
	if (!exhaustive_ok(dom, keys))
		throw LimitError("key or input space too large for exhaustive averages");
	ErrorProfile p = error_profile(locked, original, dom, keys, SweepOptions{o.threads});
	if (!o.out.empty())
		write_text_file(o.out, to_json(p).dump(2) + "\n");
	if (p.wrong_keys == 0)
		throw SpecError("no wrong keys in the key domain");
	auto t2 = average_identity(p);
	Json r;
	r["domain"] = dom.inputs;
	r["key_bits"] = keys.bits.size();
	r["wrong_keys"] = p.wrong_keys;
	r["e_w"] = to_json(t2.e_w);
	r["gamma"] = to_json(t2.gamma);
	r["identity_holds"] = t2.equal;
	return r;
}

Json cmd_metrics_expected(const Options &o)
{
	if (o.n == 0)
		throw UsageError("--n is required");
	if (o.n > 62)
		throw SpecError("n must be at most 62");
	if (!is_power_of_two(o.m) || !is_power_of_two(o.l) || o.l > o.m || o.m > (std::uint64_t{1} << o.n))
		throw SpecError("need power-of-two l <= m <= 2^n");
	Json r;
	r["n"] = o.n;
	r["m"] = o.m;
	r["l"] = o.l;
	Rational e = expected_iterations(o.n, o.m, o.l);
	r["expected_iterations"] = to_json(e);
	r["expected_iterations_value"] = to_double(e);
	Rational g = sas_gamma(o.n, o.m, o.l);
	r["gamma"] = to_json(g);
	r["inverse_gamma_value"] = to_double(1 / g);
	return r;
}

Json cmd_simulate(const Options &o)
{
	require(o.bench, "--bench");
	Circuit c = read_bench_file(o.bench);
	if (!o.key.empty())
		c = bind_key(c, load_key(o.key, key_input_names(c).size()));
	Assignment a;
	if (!o.inputs_hex.empty()) {
		BitVector bits = parse_key(o.inputs_hex, c.inputs().size());
		for (std::size_t i = 0; i < c.inputs().size(); ++i)
			a[c.inputs()[i]] = bits[i];
	}
	if (!o.assign.empty()) {
		std::string_view rest = o.assign;
		while (!rest.empty()) {
			auto comma = rest.find(',');
			std::string_view item = rest.substr(0, comma);
			rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
			auto eq = item.find('=');
			if (eq == std::string_view::npos || (item.substr(eq + 1) != "0" && item.substr(eq + 1) != "1"))
				throw UsageError("--assign expects name=0|1 pairs");
			a[std::string(item.substr(0, eq))] = item.substr(eq + 1) == "1";
		}
	}
	for (const auto &in : c.inputs())
		if (!a.contains(in))
			throw UsageError("no value for input '" + in + "'");
	Assignment out = simulate(c, a);
	BitVector y;
	Json outputs;
	for (const auto &name : c.outputs()) {
		y.push_back(out.at(name));
		outputs[name] = out.at(name) ? 1 : 0;
	}
	Json r;
	r["outputs"] = outputs;
	r["outputs_hex"] = y.to_hex();
	return r;
}

std::map<Minterm, double> load_weights(const std::string &path, unsigned width)
{
	std::map<Minterm, double> w;
	if (path.empty())
		return w;
	std::string text = read_text_file(path);
	std::istringstream in(text);
	std::string line;
	int lineno = 0;
	while (std::getline(in, line)) {
		++lineno;
		if (auto h = line.find('#'); h != std::string::npos)
			line.resize(h);
		if (line.find_first_not_of(" \t\r") == std::string::npos)
			continue;
		auto comma = line.find(',');
		if (comma == std::string::npos)
			throw ParseError("expected 'minterm_hex,weight'", lineno);
		std::string hex = line.substr(0, comma);
		if (hex == "minterm_hex")
			continue;
		try {
			w[minterm_from_hex(hex, width)] = std::stod(line.substr(comma + 1));
		} catch (const std::logic_error &) {
			throw ParseError("invalid weight", lineno);
		}
	}
	return w;
}

Json cmd_workload_select(const Options &o)
{
	if (o.traces.empty())
		throw UsageError("--trace is required");
	if (o.m == 0)
		throw UsageError("--m is required");
	std::vector<Trace> traces;
	for (const auto &p : o.traces)
		traces.push_back(load_trace(p, o.width));
	auto sel = select_critical_minterms(traces, o.m, load_weights(o.weights, traces[0].width));
	Json r;
	Json list = Json::array();
	for (Minterm x : sel.minterms)
		list.push_back(minterm_to_hex(x, traces[0].width));
	r["width"] = traces[0].width;
	r["critical_minterms"] = list;
	r["fallback_to_union"] = sel.fallback;
	if (sel.fallback)
		std::cerr << "warning: fewer than m minterms common to all traces; ranked their union\n";
	return r;
}

Json cmd_workload_impact(const Options &o)
{
	if (o.traces.size() != 1)
		throw UsageError("impact takes exactly one --trace");
	require(o.bench, "--bench");
	require(o.oracle, "--oracle");
	require(o.key, "--key");
	Circuit locked = read_bench_file(o.bench);
	Circuit original = read_bench_file(o.oracle);
	InputDomain dom = input_domain(o, locked);
	Trace t = load_trace(o.traces[0], o.width ? o.width : dom.width());
	BitVector key = load_key(o.key, key_input_names(locked).size());
	return to_json(workload_impact(t, locked, original, key, dom), dom.width());
}

Json cmd_generate(const Options &o)
{
	require(o.out, "--out");
	Circuit c = array_multiplier(o.a_bits, o.b_bits);
	write_text_file(o.out, emit_bench(c));
	Json r;
	r["circuit"] = "multiplier";
	r["a_bits"] = o.a_bits;
	r["b_bits"] = o.b_bits;
	r["bench_out"] = o.out;
	r["gates"] = c.gates().size();
	return r;
}

} // namespace

int main(int argc, char **argv)
{
	CLI::App app{"Logic-locking laboratory: lock, attack and measure combinational netlists"};
	app.set_version_flag("--version", kVersion);
	app.require_subcommand(1);
	Options o;

	auto add_seed = [&](CLI::App *sub) {
		sub->add_option("--seed", o.seed, "Seed (U64) for randomized steps")->each([&](const std::string &) {
			o.seed_given = true;
		});
	};
	auto add_threads = [&](CLI::App *sub) {
		sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
	};
	auto add_spec = [&](CLI::App *sub) {
		sub->add_option("--spec", o.spec, "Spec JSON file");
		sub->add_flag("--full-inputs", o.full_inputs, "Use every non-key input instead of the spec's slice");
	};

	auto *lock = app.add_subcommand("lock", "Lock a BENCH circuit");
	lock->add_option("--bench", o.bench, "Input BENCH file");
	lock->add_option("--scheme", o.scheme, "sas | rsas | antisat | sfll-flex");
	lock->add_option("--spec", o.spec, "Spec JSON file");
	lock->add_option("--out", o.out, "Locked BENCH output");
	lock->add_option("--key-out", o.key_out, "Correct key output (hex)");
	lock->add_option("--spec-out", o.spec_out, "Full spec echo (JSON)");
	add_seed(lock);
	add_threads(lock);

	auto *attack = app.add_subcommand("attack", "Attack a locked circuit");
	attack->require_subcommand(1);
	auto add_attack_common = [&](CLI::App *sub) {
		sub->add_option("--bench", o.bench, "Locked BENCH file");
		sub->add_option("--oracle", o.oracle, "Original (oracle) BENCH file");
		sub->add_option("--key", o.key, "Correct key; activates the locked circuit as oracle");
		add_seed(sub);
	};
	auto *sat = attack->add_subcommand("sat", "Oracle-guided SAT attack");
	add_attack_common(sat);
	sat->add_option("--iter-limit", o.iter_limit, "Iteration limit");
	sat->add_option("--time-limit", o.time_limit, "Seconds, 0 = none");
	sat->add_option("--dump-cnf", o.dump_cnf, "Write DIMACS per iteration into DIR");
	sat->add_option("--branching", o.branching, "inputs-first | vsids");
	add_threads(sat);
	auto *approx = attack->add_subcommand("approx", "SAT attack stopped after a window, error sampled");
	add_attack_common(approx);
	approx->add_option("--iter-limit", o.iter_limit, "Settle window (iterations)");
	approx->add_option("--sample", o.sample, "Error samples");
	approx->add_option("--branching", o.branching, "inputs-first | vsids");
	add_threads(approx);
	auto *removal = attack->add_subcommand("removal", "Signal-probability-skew removal attack");
	add_attack_common(removal);
	add_spec(removal);
	removal->add_option("--wire", o.wire, "Wire to tie to 0 (default: automatic)");
	removal->add_option("--out", o.out, "Post-removal BENCH output");
	add_threads(removal);
	auto *model = attack->add_subcommand("model", "Uniform-random-DI model of the SAT attack");
	model->add_option("--spec", o.spec, "Spec JSON file");
	model->add_option("--trials", o.trials, "Trials");
	add_seed(model);
	add_threads(model);

	auto *metrics = app.add_subcommand("metrics", "Error-rate metrics");
	metrics->require_subcommand(1);
	auto add_metric_common = [&](CLI::App *sub) {
		sub->add_option("--bench", o.bench, "Locked BENCH file");
		sub->add_option("--oracle", o.oracle, "Original BENCH file");
		add_spec(sub);
		add_threads(sub);
	};
	auto *ker_cmd = metrics->add_subcommand("ker", "Key error rate of one key");
	add_metric_common(ker_cmd);
	ker_cmd->add_option("--key", o.key, "Key file");
	ker_cmd->add_option("--sample", o.sample, "Sample count instead of enumeration");
	add_seed(ker_cmd);
	auto *ier_cmd = metrics->add_subcommand("ier", "Input error rates over wrong keys");
	add_metric_common(ier_cmd);
	ier_cmd->add_option("--minterm", o.minterm, "Single minterm (hex)");
	ier_cmd->add_option("--key", o.key, "Correct key; excludes its class from sampling");
	ier_cmd->add_option("--sample", o.sample, "Sample count instead of enumeration");
	ier_cmd->add_option("--out", o.out, "IER table CSV output");
	add_seed(ier_cmd);
	auto *avg_cmd = metrics->add_subcommand("averages", "e_w and gamma, and whether they are equal");
	add_metric_common(avg_cmd);
	avg_cmd->add_option("--out", o.out, "Full error profile JSON output");
	auto *exp_cmd = metrics->add_subcommand("expected", "Closed-form expected SAT iterations");
	exp_cmd->add_option("--n", o.n, "Slice width");
	exp_cmd->add_option("--m", o.m, "Critical minterms");
	exp_cmd->add_option("--l", o.l, "Blocks");
	add_threads(exp_cmd);

	auto *simulate_cmd = app.add_subcommand("simulate", "Evaluate a circuit on one input");
	simulate_cmd->add_option("--bench", o.bench, "BENCH file");
	simulate_cmd->add_option("--key", o.key, "Key file bound to keyinput*");
	simulate_cmd->add_option("--inputs", o.inputs_hex, "Non-key inputs as hex, first input = MSB");
	simulate_cmd->add_option("--assign", o.assign, "name=0|1 pairs, comma separated");
	add_threads(simulate_cmd);

	auto *workload = app.add_subcommand("workload", "Trace-driven critical minterms and impact");
	workload->require_subcommand(1);
	auto *select = workload->add_subcommand("select", "Pick critical minterms from traces");
	select->add_option("--trace", o.traces, "Trace CSV (repeatable)");
	select->add_option("--m", o.m, "Number of minterms");
	select->add_option("--weights", o.weights, "CSV minterm_hex,weight");
	select->add_option("--width", o.width, "Minterm width (default: from hex digits)");
	add_threads(select);
	auto *impact = workload->add_subcommand("impact", "Trace mass corrupted by one key");
	impact->add_option("--trace", o.traces, "Trace CSV");
	impact->add_option("--bench", o.bench, "Locked BENCH file");
	impact->add_option("--oracle", o.oracle, "Original BENCH file");
	impact->add_option("--key", o.key, "Key file");
	impact->add_option("--width", o.width, "Minterm width");
	add_spec(impact);
	add_threads(impact);

	auto *generate = app.add_subcommand("generate", "Generate benchmark circuits");
	generate->require_subcommand(1);
	auto *mult = generate->add_subcommand("multiplier", "Unsigned array multiplier");
	mult->add_option("--a-bits", o.a_bits, "Width of a")->check(CLI::Range(1u, 32u));
	mult->add_option("--b-bits", o.b_bits, "Width of b")->check(CLI::Range(1u, 32u));
	mult->add_option("--out", o.out, "BENCH output");
	add_threads(mult);

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		return app.exit(e) == 0 ? kOk : kUsage;
	}

	std::string command;
	for (int i = 1; i < argc; ++i)
		command += (i > 1 ? " " : "") + std::string(argv[i]);

	auto start = std::chrono::steady_clock::now();
	try {
		double attack_wall = -1;
		Json results;
		std::string name;
		if (*lock)
			name = "lock", results = cmd_lock(o);
		else if (*sat)
			name = "attack sat", results = cmd_attack_sat(o, attack_wall);
		else if (*approx)
			name = "attack approx", results = cmd_attack_approx(o, attack_wall);
		else if (*removal)
			name = "attack removal", results = cmd_attack_removal(o);
		else if (*model)
			name = "attack model", results = cmd_attack_model(o);
		else if (*ker_cmd)
			name = "metrics ker", results = cmd_metrics_ker(o);
		else if (*ier_cmd)
			name = "metrics ier", results = cmd_metrics_ier(o);
		else if (*avg_cmd)
			name = "metrics averages", results = cmd_metrics_averages(o);
		else if (*exp_cmd)
			name = "metrics expected", results = cmd_metrics_expected(o);
		else if (*simulate_cmd)
			name = "simulate", results = cmd_simulate(o);
		else if (*select)
			name = "workload select", results = cmd_workload_select(o);
		else if (*impact)
			name = "workload impact", results = cmd_workload_impact(o);
		else if (*mult)
			name = "generate multiplier", results = cmd_generate(o);
		Json report;
		report["tool"] = "saslab";
		report["version"] = kVersion;
		report["command"] = name;
		report["argv"] = command;
		if (o.seed_given)
			report["seed"] = o.seed;
		else
			report["seed"] = nullptr;
		report["results"] = std::move(results);
		double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
		report["wall_seconds"] = wall;
		if (attack_wall >= 0)
			report["attack_seconds"] = attack_wall;
		std::cout << report.dump(2) << std::endl;
		return kOk;
	} catch (const UsageError &e) {
		std::cerr << "usage error: " << e.what() << "\n";
		return kUsage;
	} catch (const ParseError &e) {
		std::cerr << "parse error: " << e.what() << "\n";
		return kParse;
	} catch (const SpecError &e) {
		std::cerr << "spec error: " << e.what() << "\n";
		return kSpec;
	} catch (const NetlistError &e) {
		std::cerr << "spec error: " << e.what() << "\n";
		return kSpec;
	} catch (const std::exception &e) {
		std::cerr << "internal error: " << e.what() << "\n";
		return kInternal;
	}
}
