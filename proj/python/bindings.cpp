#include "saslab/attacks.hpp"
#include "saslab/circuits.hpp"
#include "saslab/errors.hpp"
#include "saslab/io.hpp"
#include "saslab/locking.hpp"
#include "saslab/metrics.hpp"
#include "saslab/workload.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace saslab;

namespace {

// JSON crosses the boundary as text; the Python layer decodes it.
std::string dump(const Json &j)
{
	return j.dump();
}

Circuit parse_circuit(const std::string &text, const std::string &name)
{
	return parse_bench(text, name);
}

SpecDocument spec_from_text(const std::string &spec_json, std::optional<std::uint64_t> seed)
{
	return parse_spec(parse_json_text(spec_json), seed);
}

LockedCircuit lock(const Circuit &c, const std::string &scheme_text, const std::string &spec_json, std::uint64_t seed)
{
	auto scheme = parse_scheme(scheme_text);
	if (!scheme)
		throw SpecError("unknown scheme '" + scheme_text + "'");
	SpecDocument doc = spec_from_text(spec_json, seed);
	if (*scheme == Scheme::SfllFlex)
		return lock_sfll_flex(c, std::get<SfllSpec>(doc.spec), seed);
	if (!std::holds_alternative<SasSpec>(doc.spec))
		throw SpecError("scheme needs a SAS-style spec");
	const SasSpec &s = std::get<SasSpec>(doc.spec);
	switch (*scheme) {
	case Scheme::Sas: return lock_sas(c, s, seed);
	case Scheme::Rsas: return lock_rsas(c, s, seed);
	default: return lock_antisat(c, s, seed);
	}
}

InputDomain domain_for(const Circuit &locked, const std::optional<std::vector<std::string>> &inputs)
{
	return inputs ? InputDomain{*inputs} : full_input_domain(locked);
}

} // namespace

PYBIND11_MODULE(_core, m)
{
	m.doc() = "Logic-locking laboratory core";

	py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
	py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);
	py::register_exception<NetlistError>(m, "NetlistError", PyExc_ValueError);
	py::register_exception<EngineError>(m, "EngineError", PyExc_RuntimeError);

	py::class_<Circuit>(m, "Circuit")
		.def_static("from_bench", &parse_circuit, py::arg("text"), py::arg("name") = "circuit")
		.def_static("read", &read_bench_file, py::arg("path"))
		.def("to_bench", [](const Circuit &c) { return emit_bench(c); })
		.def_property_readonly("name", &Circuit::name)
		.def_property_readonly("inputs", &Circuit::inputs)
		.def_property_readonly("outputs", &Circuit::outputs)
		.def_property_readonly("gate_count", [](const Circuit &c) { return c.gates().size(); })
		.def("simulate", [](const Circuit &c, const Assignment &a) { return simulate(c, a); }, py::arg("inputs"))
		.def("key_inputs", [](const Circuit &c) { return key_input_names(c); })
		.def("bind_key", [](const Circuit &c, const std::string &hex) {
			return bind_key(c, parse_key(hex, key_input_names(c).size()));
		})
		.def("equivalent", [](const Circuit &a, const Circuit &b) {
			return check_equivalence(a, b, EquivalenceMode::Sat).equal;
		});

	py::class_<LockedCircuit>(m, "LockedCircuit")
		.def_property_readonly("circuit", [](const LockedCircuit &l) { return l.circuit; })
		.def_property_readonly("scheme", [](const LockedCircuit &l) { return std::string(to_string(l.scheme)); })
		.def_property_readonly("correct_key", [](const LockedCircuit &l) { return format_key(l.correct_key); })
		.def_property_readonly("input_slice", [](const LockedCircuit &l) { return l.input_slice(); })
		.def("spec_json", [](const LockedCircuit &l) { return dump(to_json(l.scheme, l.spec)); })
		.def("is_correct_key", [](const LockedCircuit &l, const std::string &hex) {
			return l.is_correct_key(parse_key(hex, l.correct_key.size()));
		});

	m.def("array_multiplier", &array_multiplier, py::arg("a_bits"), py::arg("b_bits"));
	m.def("lock", &lock, py::arg("circuit"), py::arg("scheme"), py::arg("spec_json"), py::arg("seed"));

	m.def(
		"sat_attack",
		[](const Circuit &locked, const Circuit &oracle, std::uint64_t seed, std::uint64_t iteration_limit,
			const std::string &branching) {
			AttackOptions opt;
			opt.seed = seed;
			opt.iteration_limit = iteration_limit;
			auto b = parse_branching(branching);
			if (!b)
				throw SpecError("unknown branching '" + branching + "'");
			opt.branching = *b;
			Oracle o(oracle);
			AttackResult r;
			{
				py::gil_scoped_release release;
				r = sat_attack(locked, o, opt);
			}
			return dump(to_json(r));
		},
		py::arg("locked"), py::arg("oracle"), py::arg("seed"), py::arg("iteration_limit") = 1'000'000,
		py::arg("branching") = "inputs-first");

	m.def(
		"removal_attack",
		[](const Circuit &locked) {
			RemovalResult r = removal_attack(locked);
			return py::make_tuple(r.circuit, r.removed_wires);
		},
		py::arg("locked"));

	m.def(
		"error_profile",
		[](const Circuit &locked, const Circuit &original, std::optional<std::vector<std::string>> inputs,
			unsigned threads) {
			ErrorProfile p;
			{
				py::gil_scoped_release release;
				p = error_profile(locked, original, domain_for(locked, inputs),
					full_key_domain(key_input_names(locked).size()), SweepOptions{threads});
			}
			return dump(to_json(p));
		},
		py::arg("locked"), py::arg("original"), py::arg("inputs") = py::none(), py::arg("threads") = 1);

	m.def(
		"corrupted_set",
		[](const Circuit &locked, const Circuit &original, const std::string &key,
			std::optional<std::vector<std::string>> inputs) {
			return corrupted_set(locked, original, parse_key(key, key_input_names(locked).size()),
				domain_for(locked, inputs));
		},
		py::arg("locked"), py::arg("original"), py::arg("key"), py::arg("inputs") = py::none());

	m.def("expected_iterations", [](unsigned n, unsigned m_, unsigned l) { return dump(to_json(expected_iterations(n, m_, l))); },
		py::arg("n"), py::arg("m"), py::arg("l") = 1);
	m.def("sas_gamma", [](unsigned n, unsigned m_, unsigned l) { return dump(to_json(sas_gamma(n, m_, l))); },
		py::arg("n"), py::arg("m"), py::arg("l") = 1);
	m.def("sfll_sat_success_prob", &sfll_sat_success_prob, py::arg("q"), py::arg("c"), py::arg("k"));

	m.def(
		"model_attack_sim",
		[](const std::string &spec_json, std::uint64_t trials, std::uint64_t seed, unsigned threads) {
			SpecDocument doc = spec_from_text(spec_json, seed);
			IterationStats st;
			py::gil_scoped_release release;
			if (const auto *s = std::get_if<SasSpec>(&doc.spec))
				st = model_attack_sim(*s, trials, seed, threads);
			else
				st = model_attack_sim(std::get<SfllSpec>(doc.spec), trials, seed, threads);
			return dump(to_json(st));
		},
		py::arg("spec_json"), py::arg("trials"), py::arg("seed"), py::arg("threads") = 1);

	m.def(
		"select_critical_minterms",
		[](const std::vector<std::map<Minterm, std::uint64_t>> &counts, unsigned width, unsigned m_,
			const std::map<Minterm, double> &weights) {
			std::vector<Trace> traces;
			for (const auto &c : counts) {
				Trace t;
				t.width = width;
				for (auto [x, n] : c) {
					if (x >> width)
						throw SpecError("minterm wider than the trace width");
					t.counts[x] += n;
					t.total += n;
				}
				if (t.total == 0)
					throw ParseError("trace has zero total count");
				traces.push_back(std::move(t));
			}
			Selection s = select_critical_minterms(traces, m_, weights);
			return py::make_tuple(s.minterms, s.fallback);
		},
		py::arg("traces"), py::arg("width"), py::arg("m"), py::arg("weights") = std::map<Minterm, double>{});
}
