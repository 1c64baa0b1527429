#pragma once

// Reference implementations used only by the tests. They work from names and
// plain loops, sharing no evaluation code with the library.

#include "saslab/bits.hpp"
#include "saslab/locking.hpp"
#include "saslab/netlist.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <algorithm>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using saslab::Circuit;
using saslab::GateKind;
using saslab::Minterm;
using Q = boost::multiprecision::cpp_rational;

inline bool gate_value(GateKind kind, const std::vector<bool> &in)
{
	bool all = true, any = false, parity = false;
	for (bool b : in) {
		all = all && b;
		any = any || b;
		parity = parity != b;
	}
	switch (kind) {
	case GateKind::And: return all;
	case GateKind::Or: return any;
	case GateKind::Nand: return !all;
	case GateKind::Nor: return !any;
	case GateKind::Xor: return parity;
	case GateKind::Xnor: return !parity;
	case GateKind::Not: return !in.at(0);
	case GateKind::Buf: return in.at(0);
	}
	return false;
}

/// Repeated relaxation over the gate list until every wire is known, so it
/// does not rely on the stored topological order.
inline std::map<std::string, bool> eval(const Circuit &c, const std::map<std::string, bool> &inputs)
{
	std::map<std::string, bool> v = inputs;
	v["__zero"] = false;
	std::size_t known = 0;
	while (known < c.gates().size()) {
		std::size_t before = known;
		for (const auto &g : c.gates()) {
			if (v.contains(g.output))
				continue;
			std::vector<bool> in;
			bool ready = true;
			for (const auto &w : g.inputs) {
				auto it = v.find(w);
				if (it == v.end()) {
					ready = false;
					break;
				}
				in.push_back(it->second);
			}
			if (ready) {
				v[g.output] = gate_value(g.kind, in);
				++known;
			}
		}
		if (known == before)
			throw std::runtime_error("oracle: circuit does not settle");
	}
	std::map<std::string, bool> out;
	for (const auto &o : c.outputs())
		out[o] = v.at(o);
	return out;
}

/// Output vector as a list of bits in output order.
inline std::vector<bool> eval_outputs(const Circuit &c, const std::map<std::string, bool> &inputs)
{
	auto m = eval(c, inputs);
	std::vector<bool> out;
	for (const auto &o : c.outputs())
		out.push_back(m.at(o));
	return out;
}

/// Assigns the MSB-first bits of `value` to `names`.
inline void assign(std::map<std::string, bool> &a, const std::vector<std::string> &names, std::uint64_t value)
{
	for (std::size_t i = 0; i < names.size(); ++i)
		a[names[i]] = (value >> (names.size() - 1 - i)) & 1;
}

inline std::vector<std::string> keys_of(const Circuit &c)
{
	std::vector<std::string> k;
	for (std::size_t i = 0;; ++i) {
		std::string name = "keyinput" + std::to_string(i);
		if (std::find(c.inputs().begin(), c.inputs().end(), name) == c.inputs().end())
			break;
		k.push_back(name);
	}
	return k;
}

/// Brute-force satisfiability for tiny formulas.
inline std::optional<std::vector<bool>> brute_sat(int vars, const std::vector<std::vector<int>> &clauses)
{
	for (std::uint64_t a = 0; a < (std::uint64_t{1} << vars); ++a) {
		bool ok = true;
		for (const auto &cl : clauses) {
			bool sat = false;
			for (int lit : cl) {
				bool val = (a >> (std::abs(lit) - 1)) & 1;
				if ((lit > 0) == val) {
					sat = true;
					break;
				}
			}
			if (!sat) {
				ok = false;
				break;
			}
		}
		if (ok) {
			std::vector<bool> m(vars);
			for (int v = 0; v < vars; ++v)
				m[v] = (a >> v) & 1;
			return m;
		}
	}
	return std::nullopt;
}

/// Corruption table by direct enumeration: table[key][x] = outputs differ.
/// Non-key inputs outside `domain` are 0.
inline std::vector<std::vector<bool>> corruption_table(const Circuit &locked, const Circuit &original,
	const std::vector<std::string> &domain)
{
	auto keys = keys_of(locked);
	std::vector<std::vector<bool>> t(std::size_t{1} << keys.size(), std::vector<bool>(std::size_t{1} << domain.size()));
	for (std::uint64_t x = 0; x < (std::uint64_t{1} << domain.size()); ++x) {
		std::map<std::string, bool> a;
		for (const auto &in : original.inputs())
			a[in] = false;
		assign(a, domain, x);
		auto want = eval_outputs(original, a);
		for (std::uint64_t k = 0; k < t.size(); ++k) {
			auto b = a;
			assign(b, keys, k);
			t[k][x] = eval_outputs(locked, b) != want;
		}
	}
	return t;
}

struct Averages {
	Q e_w, gamma;
	std::uint64_t wrong = 0;
	std::vector<Q> ier;
};

/// Definitions 1-3 applied literally to a corruption table.
inline Averages averages(const std::vector<std::vector<bool>> &t)
{
	Averages a;
	std::size_t xs = t.at(0).size();
	std::vector<std::uint64_t> per_x(xs);
	Q ker_sum = 0;
	for (const auto &row : t) {
		std::uint64_t c = 0;
		for (std::size_t x = 0; x < xs; ++x)
			if (row[x]) {
				++c;
				++per_x[x];
			}
		if (c) {
			++a.wrong;
			ker_sum += Q(c) / Q(xs);
		}
	}
	a.e_w = ker_sum / Q(a.wrong);
	for (std::size_t x = 0; x < xs; ++x) {
		a.ier.push_back(Q(per_x[x]) / Q(a.wrong));
		a.gamma += a.ier.back();
	}
	a.gamma /= Q(xs);
	return a;
}

/// SAS block j corrupts X under (K1, K2): K1 != K2 and either X is a critical
/// minterm of the block and K1 is in its K1 set, or X is not and X ^ K1 = x_g.
inline bool sas_corrupts(const saslab::SasSpec &s, std::size_t j, Minterm x, Minterm k1, Minterm k2)
{
	if (k1 == k2)
		return false;
	if (s.is_antisat())
		return (x ^ k1) == s.x_g;
	const auto &blk = s.blocks.at(j);
	for (std::size_t i = 0; i < blk.size(); ++i)
		if (blk[i] == x) {
			const auto &set = s.k1_sets.at(j).at(i);
			return std::find(set.begin(), set.end(), k1) != set.end();
		}
	return (x ^ k1) == s.x_g;
}

/// RSAS adds a constant inversion on the block's critical minterms, which
/// the second inversion at the insertion wire cancels out.
inline bool rsas_block_value(const saslab::SasSpec &s, std::size_t j, Minterm x, Minterm k1, Minterm k2)
{
	const auto &blk = s.blocks.at(j);
	bool crit = std::find(blk.begin(), blk.end(), x) != blk.end();
	return sas_corrupts(s, j, x, k1, k2) != crit;
}

/// Random DAG with `n_in` inputs, `n_gates` gates and `n_out` outputs.
inline Circuit random_circuit(std::mt19937_64 &rng, unsigned n_in, unsigned n_gates, unsigned n_out)
{
	std::vector<std::string> wires, inputs;
	for (unsigned i = 0; i < n_in; ++i)
		inputs.push_back("i" + std::to_string(i)), wires.push_back(inputs.back());
	std::vector<saslab::Gate> gates;
	const GateKind kinds[] = {GateKind::And, GateKind::Or, GateKind::Nand, GateKind::Nor, GateKind::Xor,
		GateKind::Xnor, GateKind::Not, GateKind::Buf};
	for (unsigned g = 0; g < n_gates; ++g) {
		GateKind k = kinds[rng() % 8];
		unsigned arity = (k == GateKind::Not || k == GateKind::Buf) ? 1 : 2 + rng() % 2;
		std::set<std::string> ins;
		while (ins.size() < std::min<std::size_t>(arity, wires.size()))
			ins.insert(wires[rng() % wires.size()]);
		if (ins.size() < 2 && arity > 1)
			k = GateKind::Buf;
		std::vector<std::string> in(ins.begin(), ins.end());
		if (k == GateKind::Buf || k == GateKind::Not)
			in.resize(1);
		gates.push_back({"g" + std::to_string(g), k, in});
		wires.push_back(gates.back().output);
	}
	std::vector<std::string> outputs;
	for (unsigned o = 0; o < n_out && o < n_gates; ++o)
		outputs.push_back("g" + std::to_string(n_gates - 1 - o));
	return Circuit("random", inputs, outputs, gates);
}

} // namespace oracle
