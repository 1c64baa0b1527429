#pragma once

#include "saslab/bits.hpp"
#include "saslab/metrics.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace saslab {

/// Operand-frequency trace over n-bit minterms.
struct Trace {
	unsigned width = 0;
	std::map<Minterm, std::uint64_t> counts;
	std::uint64_t total = 0;
	std::string label;

	std::uint64_t count(Minterm x) const
	{
		auto it = counts.find(x);
		return it == counts.end() ? 0 : it->second;
	}
};

/**
 * Parses `minterm_hex,count` rows; blank lines, `#` comments and a leading
 * `minterm_hex,count` header are skipped, duplicate minterms are summed.
 * With width 0 the width is 4 * (hex digits), which must be uniform.
 */
Trace parse_trace(std::string_view text, std::string label = "trace", unsigned width = 0);
Trace load_trace(const std::string &path, unsigned width = 0);

struct Selection {
	std::vector<Minterm> minterms;
	/// Fewer than m minterms are common to all traces; the union was ranked.
	bool fallback = false;
};

/**
 * The m minterms common to every trace with the highest weighted aggregate
 * count weight(X) * sum of counts (weight 1 when unlisted), ties broken by the
 * smaller minterm.
 */
Selection select_critical_minterms(const std::vector<Trace> &traces, unsigned m,
	const std::map<Minterm, double> &weights = {});

/// Trace mass of the corrupted minterms: sum of their counts over the total.
double workload_error_rate(const Trace &trace, const std::vector<Minterm> &corrupted, unsigned width);

struct ImpactReport {
	BitVector key;
	std::vector<Minterm> corrupted;
	double workload_error_rate = 0;
	/// Corrupted minterms present in the trace with their share of the total.
	std::vector<std::pair<Minterm, double>> contributions;
};

/// Impact of one key: corrupted set over the input domain, scored on the trace.
ImpactReport workload_impact(const Trace &trace, const Circuit &locked, const Circuit &original, const BitVector &key,
	const InputDomain &inputs);

} // namespace saslab
