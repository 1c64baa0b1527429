#include "saslab/cnf.hpp"

#include <algorithm>
#include <set>

namespace saslab {

void write_dimacs(std::ostream &os, const CnfFormula &cnf)
{
	for (const auto &[wire, var] : cnf.wire_var)
		os << "c " << var << " " << wire << "\n";
	os << "p cnf " << cnf.num_vars << " " << cnf.clauses.size() << "\n";
	for (const auto &cl : cnf.clauses) {
		for (int lit : cl)
			os << lit << " ";
		os << "0\n";
	}
}

void encode_gate(ClauseSink &sink, GateKind kind, int out, std::span<const int> ins)
{
	switch (kind) {
	case GateKind::Buf:
		sink.add_clause({-out, ins[0]});
		sink.add_clause({out, -ins[0]});
		return;
	case GateKind::Not:
		sink.add_clause({-out, -ins[0]});
		sink.add_clause({out, ins[0]});
		return;
	case GateKind::And:
	case GateKind::Nand:
	case GateKind::Or:
	case GateKind::Nor: {
		// AND: out -> in_i ; (all in_i) -> out. OR is the dual; NAND/NOR negate out.
		bool is_or = kind == GateKind::Or || kind == GateKind::Nor;
		int o = (kind == GateKind::Nand || kind == GateKind::Nor) ? -out : out;
		std::vector<int> big;
		big.reserve(ins.size() + 1);
		for (int in : ins) {
			if (is_or)
				sink.add_clause({o, -in});
			else
				sink.add_clause({-o, in});
			big.push_back(is_or ? in : -in);
		}
		big.push_back(is_or ? -o : o);
		sink.add_clause(big);
		return;
	}
	case GateKind::Xor:
	case GateKind::Xnor: {
		int acc = ins[0];
		for (std::size_t i = 1; i < ins.size(); ++i) {
			bool last = i + 1 == ins.size();
			int t = last ? (kind == GateKind::Xnor ? -out : out) : sink.new_var();
			int a = acc, b = ins[i];
			sink.add_clause({-t, a, b});
			sink.add_clause({-t, -a, -b});
			sink.add_clause({t, -a, b});
			sink.add_clause({t, a, -b});
			acc = t;
		}
		return;
	}
	}
}

CnfFormula to_cnf(const Circuit &c)
{
	CnfFormula cnf;
	std::vector<int> var(c.wire_count(), 0);
	for (std::size_t i = 0; i < c.inputs().size(); ++i)
		var[i] = cnf.new_var();
	if (c.uses_zero()) {
		var[c.zero_wire()] = cnf.new_var();
		cnf.add_clause({-var[c.zero_wire()]});
	}
	for (std::size_t g = 0; g < c.gates().size(); ++g)
		var[c.gate_wire(g)] = cnf.new_var();
	std::vector<int> ins;
	for (std::size_t g = 0; g < c.gates().size(); ++g) {
		ins.clear();
		for (auto w : c.gate_fanin(g))
			ins.push_back(var[w]);
		encode_gate(cnf, c.gates()[g].kind, var[c.gate_wire(g)], ins);
	}
	for (Circuit::WireId w = 0; w < c.wire_count(); ++w)
		if (var[w] != 0)
			cnf.wire_var[c.wire_name(w)] = var[w];
	return cnf;
}

void force_signal(ClauseSink &sink, const Signal &s, bool value)
{
	if (s.is_constant()) {
		if (s.value != value)
			sink.add_clause(std::span<const int>());
		return;
	}
	sink.add_clause({value ? s.lit : -s.lit});
}

std::vector<Signal> encode_folded(const Circuit &c, std::span<const Signal> inputs, ClauseSink &sink)
{
	const std::size_t nw = c.wire_count();
	const std::size_t ng = c.gates().size();

	// Ternary pass: 0/1 constant, 2 unknown.
	std::vector<std::uint8_t> tern(nw, 2);
	for (std::size_t i = 0; i < c.inputs().size(); ++i)
		tern[i] = inputs[i].is_constant() ? inputs[i].value : 2;
	tern[c.zero_wire()] = 0;
	for (std::size_t g = 0; g < ng; ++g) {
		auto fanin = c.gate_fanin(g);
		GateKind kind = c.gates()[g].kind;
		std::uint8_t r = 2;
		switch (kind) {
		case GateKind::Buf:
		case GateKind::Not:
			r = tern[fanin[0]];
			if (r != 2 && kind == GateKind::Not)
				r ^= 1;
			break;
		case GateKind::And:
		case GateKind::Nand:
		case GateKind::Or:
		case GateKind::Nor: {
			std::uint8_t ctl = (kind == GateKind::And || kind == GateKind::Nand) ? 0 : 1;
			bool unknown = false, controlled = false;
			for (auto w : fanin) {
				if (tern[w] == ctl)
					controlled = true;
				else if (tern[w] == 2)
					unknown = true;
			}
			if (controlled)
				r = ctl;
			else if (!unknown)
				r = ctl ^ 1;
			if (r != 2 && (kind == GateKind::Nand || kind == GateKind::Nor))
				r ^= 1;
			break;
		}
		case GateKind::Xor:
		case GateKind::Xnor: {
			std::uint8_t parity = kind == GateKind::Xnor;
			for (auto w : fanin) {
				if (tern[w] == 2) {
					parity = 2;
					break;
				}
				parity ^= tern[w];
			}
			r = parity;
			break;
		}
		}
		tern[c.gate_wire(g)] = r;
	}

	// Cone of non-constant gates needed by the outputs.
	std::vector<bool> need(nw, false);
	for (auto w : c.output_wires())
		need[w] = true;
	for (std::size_t g = ng; g-- > 0;) {
		auto w = c.gate_wire(g);
		if (need[w] && tern[w] == 2)
			for (auto in : c.gate_fanin(g))
				need[in] = true;
	}

	std::vector<Signal> sig(nw);
	for (std::size_t i = 0; i < c.inputs().size(); ++i)
		sig[i] = inputs[i];
	sig[c.zero_wire()] = Signal::constant(false);
	std::vector<int> lits;
	for (std::size_t g = 0; g < ng; ++g) {
		auto w = c.gate_wire(g);
		if (tern[w] != 2) {
			sig[w] = Signal::constant(tern[w]);
			continue;
		}
		if (!need[w])
			continue;
		auto fanin = c.gate_fanin(g);
		GateKind kind = c.gates()[g].kind;
		switch (kind) {
		case GateKind::Buf:
			sig[w] = sig[fanin[0]];
			break;
		case GateKind::Not:
			sig[w] = sig[fanin[0]].negated();
			break;
		case GateKind::And:
		case GateKind::Nand:
		case GateKind::Or:
		case GateKind::Nor: {
			bool is_or = kind == GateKind::Or || kind == GateKind::Nor;
			bool inv = kind == GateKind::Nand || kind == GateKind::Nor;
			std::set<int> uniq;
			bool tautology = false;
			for (auto in : fanin) {
				if (sig[in].is_constant())
					continue; // non-controlling by the ternary pass
				int l = sig[in].lit;
				if (uniq.contains(-l))
					tautology = true;
				uniq.insert(l);
			}
			if (tautology) {
				// x & !x = 0 ; x | !x = 1
				sig[w] = Signal::constant(is_or != inv);
				break;
			}
			lits.assign(uniq.begin(), uniq.end());
			if (lits.size() == 1) {
				Signal s = Signal::literal(lits[0]);
				sig[w] = inv ? s.negated() : s;
				break;
			}
			int v = sink.new_var();
			encode_gate(sink, is_or ? GateKind::Or : GateKind::And, v, lits);
			sig[w] = inv ? Signal::literal(-v) : Signal::literal(v);
			break;
		}
		case GateKind::Xor:
		case GateKind::Xnor: {
			bool parity = kind == GateKind::Xnor;
			std::map<int, bool> count; // var -> odd occurrence
			for (auto in : fanin) {
				const Signal &s = sig[in];
				if (s.is_constant()) {
					parity ^= s.value;
					continue;
				}
				int var = std::abs(s.lit);
				if (s.lit < 0)
					parity = !parity;
				count[var] = !count[var];
			}
			lits.clear();
			for (auto [var, odd] : count)
				if (odd)
					lits.push_back(var);
			if (lits.empty()) {
				sig[w] = Signal::constant(parity);
			} else if (lits.size() == 1) {
				sig[w] = parity ? Signal::literal(-lits[0]) : Signal::literal(lits[0]);
			} else {
				int v = sink.new_var();
				encode_gate(sink, GateKind::Xor, v, lits);
				sig[w] = parity ? Signal::literal(-v) : Signal::literal(v);
			}
			break;
		}
		}
	}

	std::vector<Signal> outs;
	outs.reserve(c.output_wires().size());
	for (auto w : c.output_wires())
		outs.push_back(sig[w]);
	return outs;
}

} // namespace saslab
