#include "saslab/circuits.hpp"

#include "saslab/errors.hpp"

#include <optional>

namespace saslab {

Circuit array_multiplier(unsigned a_bits, unsigned b_bits)
{
	if (a_bits == 0 || b_bits == 0 || a_bits + b_bits > 64)
		throw SpecError("multiplier operands must be 1..63 bits wide");
	std::vector<std::string> inputs;
	for (unsigned i = a_bits; i-- > 0;)
		inputs.push_back("a" + std::to_string(i));
	for (unsigned j = b_bits; j-- > 0;)
		inputs.push_back("b" + std::to_string(j));

	std::vector<Gate> gates;
	std::size_t counter = 0;
	auto gate = [&](GateKind kind, std::vector<std::string> ins, const std::string &stem) {
		std::string name = stem + std::to_string(counter++);
		gates.push_back(Gate{name, kind, std::move(ins)});
		return name;
	};

	const unsigned width = a_bits + b_bits;
	// sum[k] is the running sum bit of weight 2^k, empty while still zero.
	std::vector<std::optional<std::string>> sum(width);
	for (unsigned j = 0; j < b_bits; ++j) {
		std::optional<std::string> carry;
		for (unsigned k = j; k < width; ++k) {
			std::optional<std::string> pp;
			if (k - j < a_bits)
				pp = gate(GateKind::And, {"a" + std::to_string(k - j), "b" + std::to_string(j)}, "pp");
			std::vector<std::string> terms;
			for (const auto *t : {&sum[k], &pp, &carry})
				if (*t)
					terms.push_back(**t);
			carry.reset();
			if (terms.size() == 1) {
				sum[k] = terms[0];
			} else if (terms.size() == 2) {
				sum[k] = gate(GateKind::Xor, terms, "s");
				carry = gate(GateKind::And, terms, "c");
			} else if (terms.size() == 3) {
				std::string t = gate(GateKind::Xor, {terms[0], terms[1]}, "t");
				sum[k] = gate(GateKind::Xor, {t, terms[2]}, "s");
				std::string c1 = gate(GateKind::And, {terms[0], terms[1]}, "c");
				std::string c2 = gate(GateKind::And, {t, terms[2]}, "c");
				carry = gate(GateKind::Or, {c1, c2}, "c");
			}
			if (k - j >= a_bits && !carry)
				break;
		}
	}
	std::vector<std::string> outputs;
	for (unsigned k = width; k-- > 0;) {
		std::string name = "p" + std::to_string(k);
		if (sum[k])
			gates.push_back(Gate{name, GateKind::Buf, {*sum[k]}});
		else
			gates.push_back(Gate{name, GateKind::Buf, {std::string(Circuit::kZeroWire)}});
		outputs.push_back(name);
	}
	return Circuit("mult" + std::to_string(a_bits) + "x" + std::to_string(b_bits), std::move(inputs),
		std::move(outputs), std::move(gates));
}

} // namespace saslab
