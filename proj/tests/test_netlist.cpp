#include "support/oracles.hpp"

#include "saslab/cnf.hpp"
#include "saslab/errors.hpp"
#include "saslab/netlist.hpp"

#include <doctest.h>

#include <sstream>

using namespace saslab;

namespace {

const char *kToyOriginal = "INPUT(x0)\nINPUT(x1)\nOUTPUT(y)\nnx0 = NOT(x0)\ny = AND(nx0, x1)\n";
const char *kToyLocked = "INPUT(x0)\nINPUT(x1)\nINPUT(keyinput0)\nINPUT(keyinput1)\nOUTPUT(y)\n"
                          "t = XOR(x0, keyinput0)\na = AND(t, x1)\ny = XNOR(a, keyinput1)\n";

Assignment bits(std::initializer_list<std::pair<const char *, bool>> items)
{
	Assignment a;
	for (auto &[k, v] : items)
		a[k] = v;
	return a;
}

} // namespace

TEST_CASE("parse minimal document")
{
	Circuit c = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a,b)");
	CHECK(c.inputs().size() == 2);
	CHECK(c.gates().size() == 1);
	CHECK(c.outputs() == std::vector<std::string>{"y"});
}

TEST_CASE("parse errors carry line numbers")
{
	CHECK_THROWS_AS(parse_bench("y = AND(a,b)"), ParseError);
	try {
		parse_bench("INPUT(a)\nOUTPUT(y)\ny = FOO(a, a)\n");
		FAIL("expected ParseError");
	} catch (const ParseError &e) {
		CHECK(e.line() == 3);
	}
	CHECK_THROWS_AS(parse_bench("INPUT(a)\nINPUT(a)\nOUTPUT(a)\n"), ParseError);
	CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a, z)\nz = AND(a, y)\n"), ParseError);
	CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a, a)\n"), ParseError);
	CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a)\n"), ParseError);
}

TEST_CASE("emit of the two-input example has one NOT and one AND line")
{
	std::string text = emit_bench(parse_bench(kToyOriginal));
	std::istringstream in(text);
	std::string line;
	int nots = 0, ands = 0;
	while (std::getline(in, line)) {
		nots += line.find("NOT(") != std::string::npos;
		ands += line.find("AND(") != std::string::npos;
	}
	CHECK(nots == 1);
	CHECK(ands == 1);
}

TEST_CASE("passthrough output becomes a BUF line")
{
	Circuit c = parse_bench("INPUT(a)\nOUTPUT(a)\n");
	std::string text = emit_bench(c);
	CHECK(text.find("BUF(") != std::string::npos);
	CHECK(parse_bench(text) == c);
}

TEST_CASE("emit/parse round trip on random circuits")
{
	std::mt19937_64 rng(11);
	for (int t = 0; t < 50; ++t) {
		Circuit c = oracle::random_circuit(rng, 2 + rng() % 5, 1 + rng() % 30, 1 + rng() % 3);
		Circuit back = parse_bench(emit_bench(c), c.name());
		CHECK(back == c);
	}
}

TEST_CASE("toy example simulation cells")
{
	Circuit locked = parse_bench(kToyLocked);
	CHECK(simulate(locked, bits({{"x0", 0}, {"x1", 1}, {"keyinput0", 1}, {"keyinput1", 1}})).at("y") == true);
	CHECK(simulate(locked, bits({{"x0", 0}, {"x1", 0}, {"keyinput0", 1}, {"keyinput1", 0}})).at("y") == true);
	Circuit orig = parse_bench(kToyOriginal);
	CHECK(simulate(orig, bits({{"x0", 0}, {"x1", 0}})).at("y") == false);
	CHECK_THROWS(simulate(orig, bits({{"x0", 0}})));
}

TEST_CASE("BUF chain passes the input through")
{
	Circuit c = parse_bench("INPUT(a)\nOUTPUT(d)\nb = BUF(a)\nc = BUF(b)\nd = BUF(c)\n");
	for (bool v : {false, true})
		CHECK(simulate(c, bits({{"a", v}})).at("d") == v);
}

TEST_CASE("simulators agree with the reference evaluator")
{
	std::mt19937_64 rng(5);
	for (int t = 0; t < 40; ++t) {
		Circuit c = oracle::random_circuit(rng, 6, 40, 3);
		PackedSimulator sim(c);
		std::vector<std::uint64_t> in(6), out(c.outputs().size());
		for (auto &w : in)
			w = rng();
		sim.run(in, out);
		for (unsigned lane = 0; lane < 64; lane += 7) {
			std::map<std::string, bool> a;
			BitVector bv;
			for (std::size_t i = 0; i < 6; ++i) {
				a[c.inputs()[i]] = (in[i] >> lane) & 1;
				bv.push_back((in[i] >> lane) & 1);
			}
			auto want = oracle::eval_outputs(c, a);
			BitVector got = evaluate(c, bv);
			auto sa = simulate(c, a);
			for (std::size_t o = 0; o < want.size(); ++o) {
				CHECK(((out[o] >> lane) & 1) == want[o]);
				CHECK(got[o] == want[o]);
				CHECK(sa.at(c.outputs()[o]) == want[o]);
			}
		}
	}
}

TEST_CASE("Tseitin CNF models are exactly the circuit's behaviors")
{
	std::mt19937_64 rng(9);
	for (int t = 0; t < 25; ++t) {
		Circuit c = oracle::random_circuit(rng, 3, 6, 2);
		CnfFormula f = to_cnf(c);
		REQUIRE(f.num_vars <= 16);
		for (const auto &cl : f.clauses)
			for (int lit : cl) {
				CHECK(lit != 0);
				CHECK(std::abs(lit) <= f.num_vars);
			}
		for (std::uint64_t x = 0; x < 8; ++x) {
			std::map<std::string, bool> a;
			oracle::assign(a, c.inputs(), x);
			auto want = oracle::eval(c, a);
			auto clauses = f.clauses;
			for (const auto &in : c.inputs())
				clauses.push_back({a[in] ? f.wire_var.at(in) : -f.wire_var.at(in)});
			auto model = oracle::brute_sat(f.num_vars, clauses);
			REQUIRE(model);
			for (const auto &o : c.outputs())
				CHECK((*model)[f.wire_var.at(o) - 1] == want.at(o));
			// The opposite output value must be infeasible.
			const auto &o = c.outputs()[0];
			clauses.push_back({want.at(o) ? -f.wire_var.at(o) : f.wire_var.at(o)});
			CHECK_FALSE(oracle::brute_sat(f.num_vars, clauses));
		}
	}
}

TEST_CASE("XOR insertion keeps the wire name and routes consumers")
{
	Circuit c = parse_bench(kToyOriginal);
	Circuit x = insert_xor_at_wire(c, "nx0", "s");
	CHECK(x.inputs().back() == "s");
	for (std::uint64_t v = 0; v < 8; ++v) {
		std::map<std::string, bool> a;
		oracle::assign(a, {"x0", "x1", "s"}, v);
		bool want = (!a["x0"] != a["s"]) && a["x1"];
		CHECK(oracle::eval(x, a).at("y") == want);
	}
	CHECK_THROWS(insert_xor_at_wire(c, "nope", "s"));
}

TEST_CASE("constant propagation and dead logic removal preserve function")
{
	std::mt19937_64 rng(21);
	for (int t = 0; t < 30; ++t) {
		Circuit c = oracle::random_circuit(rng, 5, 30, 2);
		Assignment fixed{{c.inputs()[0], bool(rng() & 1)}, {c.inputs()[1], bool(rng() & 1)}};
		Circuit b = remove_dead_logic(propagate_constants(bind_inputs(c, fixed)), [](const std::string &) { return false; });
		for (std::uint64_t x = 0; x < 8; ++x) {
			std::map<std::string, bool> a = {fixed.begin(), fixed.end()}, rest;
			oracle::assign(rest, {c.inputs()[2], c.inputs()[3], c.inputs()[4]}, x);
			a.insert(rest.begin(), rest.end());
			std::map<std::string, bool> ab;
			for (const auto &in : b.inputs())
				ab[in] = a.at(in);
			CHECK(oracle::eval_outputs(c, a) == oracle::eval_outputs(b, ab));
		}
	}
}

TEST_CASE("equivalence checking, exhaustive and SAT, matches brute force")
{
	std::mt19937_64 rng(33);
	for (int t = 0; t < 30; ++t) {
		Circuit c1 = oracle::random_circuit(rng, 4, 12, 1);
		Circuit c2 = oracle::random_circuit(rng, 4, 12, 1);
		bool same = true;
		for (std::uint64_t x = 0; x < 16; ++x) {
			std::map<std::string, bool> a;
			oracle::assign(a, c1.inputs(), x);
			same = same && oracle::eval_outputs(c1, a) == oracle::eval_outputs(c2, a);
		}
		auto ex = check_equivalence(c1, c2, EquivalenceMode::Exhaustive);
		auto sat = check_equivalence(c1, c2, EquivalenceMode::Sat);
		CHECK(ex.equal == same);
		CHECK(sat.equal == same);
		if (!same)
			CHECK(oracle::eval_outputs(c1, sat.counterexample) != oracle::eval_outputs(c2, sat.counterexample));
		CHECK(check_equivalence(c1, c1, EquivalenceMode::Sat).equal);
	}
}

TEST_CASE("signal probabilities of basic gates")
{
	Circuit c = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\nOUTPUT(z)\nOUTPUT(w)\ny = AND(a,b)\nz = OR(a,b)\nw = XOR(a,b)\n");
	auto p = signal_probabilities(c);
	CHECK(p.at("y") == doctest::Approx(0.25));
	CHECK(p.at("z") == doctest::Approx(0.75));
	CHECK(p.at("w") == doctest::Approx(0.5));
}
