#include "saslab/netlist.hpp"

#include "saslab/cnf.hpp"
#include "saslab/errors.hpp"
#include "saslab/sat.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <functional>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_set>

namespace saslab {

namespace {

constexpr std::array<std::string_view, 8> kKindNames = {"AND", "OR", "NAND", "NOR", "XOR", "XNOR", "NOT", "BUF"};

bool is_unary(GateKind kind)
{
	return kind == GateKind::Not || kind == GateKind::Buf;
}

std::string make_fresh(const std::function<bool(const std::string &)> &taken, std::string_view base)
{
	std::string name(base);
	if (!taken(name))
		return name;
	for (std::size_t i = 1;; ++i) {
		std::string candidate = name + "_" + std::to_string(i);
		if (!taken(candidate))
			return candidate;
	}
}

std::uint64_t eval_word(GateKind kind, std::span<const Circuit::WireId> fanin, const std::vector<std::uint64_t> &values)
{
	std::uint64_t acc = values[fanin[0]];
	switch (kind) {
	case GateKind::Buf:
		return acc;
	case GateKind::Not:
		return ~acc;
	case GateKind::And:
	case GateKind::Nand:
		for (std::size_t i = 1; i < fanin.size(); ++i)
			acc &= values[fanin[i]];
		return kind == GateKind::And ? acc : ~acc;
	case GateKind::Or:
	case GateKind::Nor:
		for (std::size_t i = 1; i < fanin.size(); ++i)
			acc |= values[fanin[i]];
		return kind == GateKind::Or ? acc : ~acc;
	case GateKind::Xor:
	case GateKind::Xnor:
		for (std::size_t i = 1; i < fanin.size(); ++i)
			acc ^= values[fanin[i]];
		return kind == GateKind::Xor ? acc : ~acc;
	}
	return acc;
}

} // namespace

std::string_view to_string(GateKind kind)
{
	return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<GateKind> parse_gate_kind(std::string_view text)
{
	std::string upper(text);
	for (char &ch : upper)
		ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
	if (upper == "BUFF")
		return GateKind::Buf;
	for (std::size_t i = 0; i < kKindNames.size(); ++i)
		if (upper == kKindNames[i])
			return static_cast<GateKind>(i);
	return std::nullopt;
}

bool is_valid_wire_name(std::string_view name)
{
	if (name.empty())
		return false;
	return std::all_of(name.begin(), name.end(), [](char ch) {
		return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' || ch == '[' || ch == ']';
	});
}

Circuit::Circuit(std::string name, std::vector<std::string> inputs, std::vector<std::string> outputs,
	std::vector<Gate> gates)
    : name_(std::move(name)), inputs_(std::move(inputs)), outputs_(std::move(outputs))
{
	std::unordered_map<std::string, std::size_t> defined; // name -> input index or gate index + |inputs|
	for (std::size_t i = 0; i < inputs_.size(); ++i) {
		const auto &in = inputs_[i];
		if (!is_valid_wire_name(in))
			throw NetlistError("invalid wire name '" + in + "'");
		if (in == kZeroWire)
			throw NetlistError("'__zero' is reserved and cannot be a primary input");
		if (!defined.emplace(in, i).second)
			throw NetlistError("duplicate definition of wire '" + in + "'");
	}
	for (std::size_t g = 0; g < gates.size(); ++g) {
		const Gate &gate = gates[g];
		if (!is_valid_wire_name(gate.output))
			throw NetlistError("invalid wire name '" + gate.output + "'");
		if (gate.output == kZeroWire)
			throw NetlistError("'__zero' is reserved and cannot be driven by a gate");
		if (!defined.emplace(gate.output, inputs_.size() + g).second)
			throw NetlistError("duplicate definition of wire '" + gate.output + "'");
		if (is_unary(gate.kind) ? gate.inputs.size() != 1 : gate.inputs.size() < 2)
			throw NetlistError("gate '" + gate.output + "' (" + std::string(to_string(gate.kind)) +
				") has " + std::to_string(gate.inputs.size()) + " inputs");
	}
	for (const Gate &gate : gates)
		for (const auto &in : gate.inputs)
			if (in != kZeroWire && !defined.contains(in))
				throw NetlistError("undefined wire '" + in + "' used by '" + gate.output + "'");

	// Stable topological order: among ready gates the earliest declared goes first.
	std::vector<std::size_t> pending(gates.size(), 0);
	std::vector<std::vector<std::size_t>> consumers(gates.size());
	for (std::size_t g = 0; g < gates.size(); ++g) {
		for (const auto &in : gates[g].inputs) {
			if (in == kZeroWire)
				continue;
			std::size_t src = defined.at(in);
			if (src >= inputs_.size()) {
				++pending[g];
				consumers[src - inputs_.size()].push_back(g);
			}
		}
	}
	std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
	for (std::size_t g = 0; g < gates.size(); ++g)
		if (pending[g] == 0)
			ready.push(g);
	gates_.reserve(gates.size());
	std::vector<bool> emitted(gates.size(), false);
	while (!ready.empty()) {
		std::size_t g = ready.top();
		ready.pop();
		emitted[g] = true;
		gates_.push_back(gates[g]);
		for (std::size_t c : consumers[g])
			if (--pending[c] == 0)
				ready.push(c);
	}
	if (gates_.size() != gates.size()) {
		for (std::size_t g = 0; g < gates.size(); ++g)
			if (!emitted[g])
				throw NetlistError("cyclic dependency involving wire '" + gates[g].output + "'");
	}

	auto taken = [&](const std::string &n) { return defined.contains(n) || n == kZeroWire; };
	for (auto &out : outputs_) {
		if (out != kZeroWire && !defined.contains(out))
			throw NetlistError("output '" + out + "' refers to an undefined wire");
		bool passthrough = out == kZeroWire || defined.at(out) < inputs_.size();
		if (passthrough) {
			std::string buf = make_fresh(taken, out == kZeroWire ? std::string("zero_po") : out + "_po");
			defined.emplace(buf, inputs_.size() + gates_.size());
			gates_.push_back(Gate{buf, GateKind::Buf, {out}});
			out = buf;
		}
	}

	// Compile.
	for (std::size_t i = 0; i < inputs_.size(); ++i)
		index_.emplace(inputs_[i], static_cast<WireId>(i));
	index_.emplace(std::string(kZeroWire), zero_wire());
	for (std::size_t g = 0; g < gates_.size(); ++g)
		index_.emplace(gates_[g].output, gate_wire(g));
	fanin_offset_.assign(1, 0);
	for (const Gate &gate : gates_) {
		for (const auto &in : gate.inputs) {
			WireId id = index_.at(in);
			if (id == zero_wire())
				uses_zero_ = true;
			fanin_.push_back(id);
		}
		fanin_offset_.push_back(fanin_.size());
	}
	for (const auto &out : outputs_)
		output_ids_.push_back(index_.at(out));
}

std::optional<Circuit::WireId> Circuit::find_wire(std::string_view name) const
{
	auto it = index_.find(std::string(name));
	if (it == index_.end())
		return std::nullopt;
	return it->second;
}

const std::string &Circuit::wire_name(WireId id) const
{
	static const std::string zero(kZeroWire);
	if (id < inputs_.size())
		return inputs_[id];
	if (id == zero_wire())
		return zero;
	return gates_.at(id - inputs_.size() - 1).output;
}

std::optional<std::size_t> Circuit::driver(WireId id) const
{
	if (id <= zero_wire())
		return std::nullopt;
	return id - inputs_.size() - 1;
}

std::vector<std::vector<std::size_t>> Circuit::fanouts() const
{
	std::vector<std::vector<std::size_t>> result(wire_count());
	for (std::size_t g = 0; g < gates_.size(); ++g)
		for (WireId in : gate_fanin(g))
			result[in].push_back(g);
	return result;
}

std::vector<bool> Circuit::transitive_fanout(std::span<const WireId> roots) const
{
	std::vector<bool> mark(wire_count(), false);
	for (WireId r : roots)
		mark[r] = true;
	for (std::size_t g = 0; g < gates_.size(); ++g)
		for (WireId in : gate_fanin(g))
			if (mark[in]) {
				mark[gate_wire(g)] = true;
				break;
			}
	return mark;
}

std::vector<bool> Circuit::transitive_fanin(std::span<const WireId> roots) const
{
	std::vector<bool> mark(wire_count(), false);
	for (WireId r : roots)
		mark[r] = true;
	for (std::size_t g = gates_.size(); g-- > 0;)
		if (mark[gate_wire(g)])
			for (WireId in : gate_fanin(g))
				mark[in] = true;
	return mark;
}

std::string fresh_wire_name(const Circuit &c, std::string_view base)
{
	return make_fresh([&](const std::string &n) { return c.has_wire(n); }, base);
}

// ---------------------------------------------------------------------------
// BENCH

namespace {

std::string_view trim(std::string_view s)
{
	while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
		s.remove_prefix(1);
	while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
		s.remove_suffix(1);
	return s;
}

bool iequals(std::string_view a, std::string_view b)
{
	return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
		return std::toupper(static_cast<unsigned char>(x)) == std::toupper(static_cast<unsigned char>(y));
	});
}

// Parses "KEYWORD(arg)" and returns arg, or nullopt when the keyword differs.
std::optional<std::string_view> parse_call(std::string_view line, std::string_view keyword, int lineno)
{
	auto open = line.find('(');
	if (open == std::string_view::npos || !iequals(trim(line.substr(0, open)), keyword))
		return std::nullopt;
	if (line.back() != ')')
		throw ParseError("expected ')' at end of " + std::string(keyword) + " declaration", lineno);
	auto arg = trim(line.substr(open + 1, line.size() - open - 2));
	if (!is_valid_wire_name(arg))
		throw ParseError("invalid wire name '" + std::string(arg) + "'", lineno);
	return arg;
}

} // namespace

Circuit parse_bench(std::string_view text, std::string name)
{
	std::vector<std::string> inputs;
	std::vector<std::string> outputs;
	std::vector<Gate> gates;
	std::vector<int> gate_lines;
	std::unordered_map<std::string, int> defined_at;

	int lineno = 0;
	std::size_t pos = 0;
	while (pos <= text.size()) {
		auto nl = text.find('\n', pos);
		std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
		pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
		++lineno;
		if (auto hash = raw.find('#'); hash != std::string_view::npos)
			raw = raw.substr(0, hash);
		std::string_view line = trim(raw);
		if (line.empty())
			continue;

		auto define = [&](std::string_view wire) {
			std::string w(wire);
			if (!defined_at.emplace(w, lineno).second)
				throw ParseError("duplicate definition of wire '" + w + "' (first defined on line " +
						std::to_string(defined_at[w]) + ")",
					lineno);
		};

		auto eq = line.find('=');
		if (eq == std::string_view::npos) {
			if (auto arg = parse_call(line, "INPUT", lineno)) {
				if (*arg == Circuit::kZeroWire)
					continue;
				define(*arg);
				inputs.emplace_back(*arg);
			} else if (auto arg = parse_call(line, "OUTPUT", lineno)) {
				outputs.emplace_back(*arg);
			} else {
				throw ParseError("unrecognized statement '" + std::string(line) + "'", lineno);
			}
			continue;
		}

		std::string_view lhs = trim(line.substr(0, eq));
		std::string_view rhs = trim(line.substr(eq + 1));
		if (!is_valid_wire_name(lhs))
			throw ParseError("invalid wire name '" + std::string(lhs) + "'", lineno);
		auto open = rhs.find('(');
		if (open == std::string_view::npos || rhs.back() != ')')
			throw ParseError("expected KIND(args) after '='", lineno);
		std::string_view kind_text = trim(rhs.substr(0, open));
		auto kind = parse_gate_kind(kind_text);
		if (!kind) {
			if (iequals(kind_text, "DFF"))
				throw ParseError("sequential element DFF is not supported (combinational netlists only)", lineno);
			throw ParseError("unknown gate kind '" + std::string(kind_text) + "'", lineno);
		}
		Gate gate{std::string(lhs), *kind, {}};
		std::string_view args = rhs.substr(open + 1, rhs.size() - open - 2);
		std::size_t start = 0;
		while (true) {
			auto comma = args.find(',', start);
			auto arg = trim(args.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
			if (!is_valid_wire_name(arg))
				throw ParseError("invalid operand '" + std::string(arg) + "'", lineno);
			gate.inputs.emplace_back(arg);
			if (comma == std::string_view::npos)
				break;
			start = comma + 1;
		}
		if (is_unary(gate.kind) ? gate.inputs.size() != 1 : gate.inputs.size() < 2)
			throw ParseError(std::string(to_string(gate.kind)) + " with " + std::to_string(gate.inputs.size()) +
					" operands",
				lineno);
		define(lhs);
		gates.push_back(std::move(gate));
		gate_lines.push_back(lineno);
	}

	for (std::size_t g = 0; g < gates.size(); ++g)
		for (const auto &in : gates[g].inputs)
			if (in != Circuit::kZeroWire && !defined_at.contains(in))
				throw ParseError("undefined wire '" + in + "'", gate_lines[g]);
	for (const auto &out : outputs)
		if (!defined_at.contains(out))
			throw ParseError("output '" + out + "' refers to an undefined wire");

	try {
		return Circuit(std::move(name), std::move(inputs), std::move(outputs), std::move(gates));
	} catch (const NetlistError &e) {
		throw ParseError(e.what());
	}
}

Circuit read_bench_file(const std::string &path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw ParseError("cannot read '" + path + "'");
	std::ostringstream buf;
	buf << in.rdbuf();
	std::string name = path;
	if (auto slash = name.find_last_of('/'); slash != std::string::npos)
		name = name.substr(slash + 1);
	if (auto dot = name.find_last_of('.'); dot != std::string::npos && dot > 0)
		name = name.substr(0, dot);
	for (char &ch : name)
		if (!is_valid_wire_name(std::string_view(&ch, 1)))
			ch = '_';
	return parse_bench(buf.str(), name);
}

std::string emit_bench(const Circuit &c)
{
	std::ostringstream out;
	for (const auto &in : c.inputs())
		out << "INPUT(" << in << ")\n";
	if (c.uses_zero())
		out << "INPUT(" << Circuit::kZeroWire << ")\n";
	for (const auto &o : c.outputs())
		out << "OUTPUT(" << o << ")\n";
	for (const Gate &g : c.gates()) {
		out << g.output << " = " << to_string(g.kind) << "(";
		for (std::size_t i = 0; i < g.inputs.size(); ++i)
			out << (i ? ", " : "") << g.inputs[i];
		out << ")\n";
	}
	return out.str();
}

// ---------------------------------------------------------------------------
// Simulation

PackedSimulator::PackedSimulator(const Circuit &c) : circuit_(&c), values_(c.wire_count(), 0) {}

void PackedSimulator::run(std::span<const std::uint64_t> inputs, std::span<std::uint64_t> outputs)
{
	const Circuit &c = *circuit_;
	for (std::size_t i = 0; i < c.inputs().size(); ++i)
		values_[i] = inputs[i];
	values_[c.zero_wire()] = 0;
	for (std::size_t g = 0; g < c.gates().size(); ++g)
		values_[c.gate_wire(g)] = eval_word(c.gates()[g].kind, c.gate_fanin(g), values_);
	for (std::size_t o = 0; o < outputs.size() && o < c.output_wires().size(); ++o)
		outputs[o] = values_[c.output_wires()[o]];
}

BitVector evaluate(const Circuit &c, const BitVector &inputs)
{
	if (inputs.size() != c.inputs().size())
		throw NetlistError("expected " + std::to_string(c.inputs().size()) + " input bits, got " +
			std::to_string(inputs.size()));
	std::vector<std::uint64_t> in(inputs.size());
	for (std::size_t i = 0; i < inputs.size(); ++i)
		in[i] = inputs[i] ? 1 : 0;
	std::vector<std::uint64_t> out(c.outputs().size());
	PackedSimulator sim(c);
	sim.run(in, out);
	BitVector result(out.size());
	for (std::size_t o = 0; o < out.size(); ++o)
		result.set(o, out[o] & 1);
	return result;
}

namespace {

std::vector<std::uint64_t> pack_inputs(const Circuit &c, std::span<const Assignment> batch)
{
	std::vector<std::uint64_t> words(c.inputs().size(), 0);
	for (std::size_t p = 0; p < batch.size(); ++p) {
		for (std::size_t i = 0; i < c.inputs().size(); ++i) {
			auto it = batch[p].find(c.inputs()[i]);
			if (it == batch[p].end())
				throw NetlistError("missing value for input '" + c.inputs()[i] + "'");
			if (it->second)
				words[i] |= std::uint64_t{1} << p;
		}
	}
	return words;
}

} // namespace

Assignment simulate(const Circuit &c, const Assignment &inputs)
{
	return simulate_batch(c, {inputs}).front();
}

std::vector<Assignment> simulate_batch(const Circuit &c, const std::vector<Assignment> &inputs)
{
	std::vector<Assignment> results;
	results.reserve(inputs.size());
	PackedSimulator sim(c);
	std::vector<std::uint64_t> out(c.outputs().size());
	for (std::size_t base = 0; base < inputs.size(); base += 64) {
		std::size_t count = std::min<std::size_t>(64, inputs.size() - base);
		auto words = pack_inputs(c, std::span(inputs).subspan(base, count));
		sim.run(words, out);
		for (std::size_t p = 0; p < count; ++p) {
			Assignment a;
			for (std::size_t o = 0; o < out.size(); ++o)
				a[c.outputs()[o]] = (out[o] >> p) & 1;
			results.push_back(std::move(a));
		}
	}
	return results;
}

// ---------------------------------------------------------------------------
// Transformations

Circuit insert_xor_at_wire(const Circuit &c, const std::string &wire, const std::string &signal)
{
	auto wid = c.find_wire(wire);
	if (!wid || *wid == c.zero_wire())
		throw NetlistError("unknown wire '" + wire + "'");
	std::vector<std::string> inputs = c.inputs();
	std::vector<std::string> outputs = c.outputs();
	std::vector<Gate> gates = c.gates();

	if (auto sid = c.find_wire(signal)) {
		Circuit::WireId root = *wid;
		if (c.transitive_fanout(std::span(&root, 1))[*sid])
			throw NetlistError("inserting '" + signal + "' at '" + wire + "' would create a cycle");
	} else {
		if (!is_valid_wire_name(signal))
			throw NetlistError("invalid wire name '" + signal + "'");
		inputs.push_back(signal);
	}
	auto taken = [&](const std::string &n) { return c.has_wire(n) || n == signal; };

	if (auto g = c.driver(*wid)) {
		std::string orig = make_fresh(taken, wire + "_orig");
		gates[*g].output = orig;
		gates.push_back(Gate{wire, GateKind::Xor, {orig, signal}});
	} else {
		std::string routed = make_fresh(taken, wire + "_x");
		for (Gate &gate : gates)
			std::replace(gate.inputs.begin(), gate.inputs.end(), wire, routed);
		std::replace(outputs.begin(), outputs.end(), wire, routed);
		gates.push_back(Gate{routed, GateKind::Xor, {wire, signal}});
	}
	return Circuit(c.name(), std::move(inputs), std::move(outputs), std::move(gates));
}

Circuit bind_inputs(const Circuit &c, const Assignment &values)
{
	std::vector<std::string> inputs;
	std::vector<Gate> gates;
	for (const auto &[name, bit] : values)
		if (std::find(c.inputs().begin(), c.inputs().end(), name) == c.inputs().end())
			throw NetlistError("'" + name + "' is not a primary input");
	for (const auto &in : c.inputs()) {
		auto it = values.find(in);
		if (it == values.end())
			inputs.push_back(in);
		else
			gates.push_back(Gate{in, it->second ? GateKind::Not : GateKind::Buf, {std::string(Circuit::kZeroWire)}});
	}
	gates.insert(gates.end(), c.gates().begin(), c.gates().end());
	return Circuit(c.name(), std::move(inputs), c.outputs(), std::move(gates));
}

Circuit tie_to_zero(const Circuit &c, const std::string &wire)
{
	auto wid = c.find_wire(wire);
	if (!wid || *wid == c.zero_wire())
		throw NetlistError("unknown wire '" + wire + "'");
	std::vector<Gate> gates = c.gates();
	std::vector<std::string> outputs = c.outputs();
	const Gate zero_buf{wire, GateKind::Buf, {std::string(Circuit::kZeroWire)}};
	if (auto g = c.driver(*wid)) {
		gates[*g] = zero_buf;
	} else {
		std::string tied = fresh_wire_name(c, wire + "_tied");
		for (Gate &gate : gates)
			std::replace(gate.inputs.begin(), gate.inputs.end(), wire, tied);
		std::replace(outputs.begin(), outputs.end(), wire, tied);
		gates.push_back(Gate{tied, GateKind::Buf, {std::string(Circuit::kZeroWire)}});
	}
	return Circuit(c.name(), c.inputs(), std::move(outputs), std::move(gates));
}

Circuit propagate_constants(const Circuit &c)
{
	// -1 unknown, 0/1 constant.
	std::vector<int> value(c.wire_count(), -1);
	value[c.zero_wire()] = 0;
	std::vector<Gate> gates;
	gates.reserve(c.gates().size());
	const std::string zero(Circuit::kZeroWire);
	for (std::size_t g = 0; g < c.gates().size(); ++g) {
		const Gate &gate = c.gates()[g];
		auto fanin = c.gate_fanin(g);
		GateKind kind = gate.kind;
		bool invert = kind == GateKind::Nand || kind == GateKind::Nor || kind == GateKind::Xnor || kind == GateKind::Not;
		std::vector<std::string> live;
		int result = -1;
		switch (kind) {
		case GateKind::Buf:
		case GateKind::Not:
			if (value[fanin[0]] >= 0)
				result = value[fanin[0]] ^ invert;
			else
				live.push_back(gate.inputs[0]);
			break;
		case GateKind::And:
		case GateKind::Nand:
		case GateKind::Or:
		case GateKind::Nor: {
			int controlling = (kind == GateKind::And || kind == GateKind::Nand) ? 0 : 1;
			for (std::size_t i = 0; i < fanin.size(); ++i) {
				if (value[fanin[i]] == controlling) {
					result = controlling ^ invert;
					break;
				}
				if (value[fanin[i]] < 0)
					live.push_back(gate.inputs[i]);
			}
			if (result < 0 && live.empty())
				result = (1 - controlling) ^ invert;
			break;
		}
		case GateKind::Xor:
		case GateKind::Xnor:
			for (std::size_t i = 0; i < fanin.size(); ++i) {
				if (value[fanin[i]] == 1)
					invert = !invert;
				else if (value[fanin[i]] < 0)
					live.push_back(gate.inputs[i]);
			}
			if (live.empty())
				result = invert ? 1 : 0;
			break;
		}
		value[c.gate_wire(g)] = result;
		if (result >= 0) {
			gates.push_back(Gate{gate.output, result ? GateKind::Not : GateKind::Buf, {zero}});
			continue;
		}
		if (live.size() == 1) {
			gates.push_back(Gate{gate.output, invert ? GateKind::Not : GateKind::Buf, std::move(live)});
			continue;
		}
		GateKind reduced = kind;
		if (kind == GateKind::Xor || kind == GateKind::Xnor)
			reduced = invert ? GateKind::Xnor : GateKind::Xor;
		gates.push_back(Gate{gate.output, reduced, std::move(live)});
	}
	return Circuit(c.name(), c.inputs(), c.outputs(), std::move(gates));
}

Circuit remove_dead_logic(const Circuit &c, const std::function<bool(const std::string &)> &drop_if_unused)
{
	auto live = c.transitive_fanin(c.output_wires());
	std::vector<std::string> inputs;
	for (std::size_t i = 0; i < c.inputs().size(); ++i)
		if (live[i] || !drop_if_unused(c.inputs()[i]))
			inputs.push_back(c.inputs()[i]);
	std::vector<Gate> gates;
	for (std::size_t g = 0; g < c.gates().size(); ++g)
		if (live[c.gate_wire(g)])
			gates.push_back(c.gates()[g]);
	return Circuit(c.name(), std::move(inputs), c.outputs(), std::move(gates));
}

// ---------------------------------------------------------------------------
// Miter and equivalence

namespace {

void check_interface(const Circuit &c1, const Circuit &c2)
{
	std::set<std::string> a(c1.inputs().begin(), c1.inputs().end());
	std::set<std::string> b(c2.inputs().begin(), c2.inputs().end());
	if (a != b)
		throw NetlistError("interface mismatch: primary inputs differ");
	if (c1.outputs().size() != c2.outputs().size())
		throw NetlistError("interface mismatch: " + std::to_string(c1.outputs().size()) + " vs " +
			std::to_string(c2.outputs().size()) + " outputs");
}

} // namespace

Circuit build_miter(const Circuit &c1, const Circuit &c2)
{
	check_interface(c1, c2);
	std::set<std::string> shared(c1.inputs().begin(), c1.inputs().end());
	shared.insert(std::string(Circuit::kZeroWire));
	auto rename = [&](const std::string &prefix, const std::string &w) { return shared.contains(w) ? w : prefix + w; };

	std::vector<Gate> gates;
	for (const auto &[prefix, circuit] : {std::pair{std::string("m1."), &c1}, std::pair{std::string("m2."), &c2}}) {
		for (const Gate &g : circuit->gates()) {
			Gate copy{rename(prefix, g.output), g.kind, {}};
			for (const auto &in : g.inputs)
				copy.inputs.push_back(rename(prefix, in));
			gates.push_back(std::move(copy));
		}
	}
	std::vector<std::string> diffs;
	for (std::size_t o = 0; o < c1.outputs().size(); ++o) {
		std::string d = "miter.d" + std::to_string(o);
		gates.push_back(Gate{d, GateKind::Xor, {rename("m1.", c1.outputs()[o]), rename("m2.", c2.outputs()[o])}});
		diffs.push_back(d);
	}
	if (diffs.empty())
		gates.push_back(Gate{"miter", GateKind::Buf, {std::string(Circuit::kZeroWire)}});
	else if (diffs.size() == 1)
		gates.push_back(Gate{"miter", GateKind::Buf, diffs});
	else
		gates.push_back(Gate{"miter", GateKind::Or, diffs});
	return Circuit(c1.name() + "_miter", c1.inputs(), {"miter"}, std::move(gates));
}

EquivalenceResult check_equivalence(const Circuit &c1, const Circuit &c2, EquivalenceMode mode, unsigned width_limit)
{
	check_interface(c1, c2);
	const std::size_t width = c1.inputs().size();
	EquivalenceResult result;

	if (mode == EquivalenceMode::Exhaustive) {
		if (width > width_limit)
			throw LimitError("exhaustive equivalence over " + std::to_string(width) + " inputs exceeds the limit of " +
				std::to_string(width_limit));
		std::vector<std::size_t> pos2(width);
		for (std::size_t i = 0; i < width; ++i)
			pos2[i] = std::find(c1.inputs().begin(), c1.inputs().end(), c2.inputs()[i]) - c1.inputs().begin();
		PackedSimulator s1(c1), s2(c2);
		std::vector<std::uint64_t> in1(width), in2(width), out1(c1.outputs().size()), out2(c2.outputs().size());
		const std::uint64_t total = std::uint64_t{1} << width;
		for (std::uint64_t base = 0; base < total; base += 64) {
			std::uint64_t count = std::min<std::uint64_t>(64, total - base);
			for (std::size_t i = 0; i < width; ++i) {
				std::uint64_t w = 0;
				for (std::uint64_t p = 0; p < count; ++p)
					w |= (((base + p) >> (width - 1 - i)) & 1) << p;
				in1[i] = w;
			}
			for (std::size_t i = 0; i < width; ++i)
				in2[i] = in1[pos2[i]];
			s1.run(in1, out1);
			s2.run(in2, out2);
			std::uint64_t diff = 0;
			for (std::size_t o = 0; o < out1.size(); ++o)
				diff |= out1[o] ^ out2[o];
			if (count < 64)
				diff &= (std::uint64_t{1} << count) - 1;
			if (diff) {
				std::uint64_t p = static_cast<std::uint64_t>(std::countr_zero(diff));
				result.equal = false;
				for (std::size_t i = 0; i < width; ++i)
					result.counterexample[c1.inputs()[i]] = ((base + p) >> (width - 1 - i)) & 1;
				return result;
			}
		}
		return result;
	}

	Circuit miter = build_miter(c1, c2);
	CnfFormula cnf = to_cnf(miter);
	CdclSolver solver;
	while (solver.num_vars() < cnf.num_vars)
		solver.new_var();
	for (const auto &cl : cnf.clauses)
		solver.add_clause(cl);
	int out = cnf.wire_var.at("miter");
	std::vector<int> assume{out};
	switch (solver.solve(assume)) {
	case SolveResult::Unsat:
		return result;
	case SolveResult::Sat:
		result.equal = false;
		for (const auto &in : c1.inputs())
			result.counterexample[in] = solver.model_value(cnf.wire_var.at(in));
		return result;
	default:
		throw EngineError("satisfiability engine returned no verdict for the equivalence miter");
	}
}

std::map<std::string, double> signal_probabilities(const Circuit &c, const std::map<std::string, double> &input_probs)
{
	std::vector<double> p(c.wire_count(), 0.0);
	for (std::size_t i = 0; i < c.inputs().size(); ++i) {
		auto it = input_probs.find(c.inputs()[i]);
		double v = it == input_probs.end() ? 0.5 : it->second;
		if (!(v >= 0.0 && v <= 1.0))
			throw SpecError("probability of '" + c.inputs()[i] + "' outside [0,1]");
		p[i] = v;
	}
	p[c.zero_wire()] = 0.0;
	for (std::size_t g = 0; g < c.gates().size(); ++g) {
		auto fanin = c.gate_fanin(g);
		double acc = p[fanin[0]];
		GateKind kind = c.gates()[g].kind;
		for (std::size_t i = 1; i < fanin.size(); ++i) {
			double q = p[fanin[i]];
			switch (kind) {
			case GateKind::And:
			case GateKind::Nand:
				acc = acc * q;
				break;
			case GateKind::Or:
			case GateKind::Nor:
				acc = 1.0 - (1.0 - acc) * (1.0 - q);
				break;
			case GateKind::Xor:
			case GateKind::Xnor:
				acc = acc + q - 2.0 * acc * q;
				break;
			default:
				break;
			}
		}
		if (kind == GateKind::Not || kind == GateKind::Nand || kind == GateKind::Nor || kind == GateKind::Xnor)
			acc = 1.0 - acc;
		p[c.gate_wire(g)] = acc;
	}
	std::map<std::string, double> result;
	for (Circuit::WireId w = 0; w < c.wire_count(); ++w)
		if (w != c.zero_wire() || c.uses_zero())
			result[c.wire_name(w)] = p[w];
	return result;
}

} // namespace saslab
