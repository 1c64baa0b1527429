#include "saslab/workload.hpp"

#include "saslab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace saslab {

namespace {

std::string_view trim(std::string_view s)
{
	while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
		s.remove_prefix(1);
	while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
		s.remove_suffix(1);
	return s;
}

} // namespace

Trace parse_trace(std::string_view text, std::string label, unsigned width)
{
	Trace t;
	t.label = std::move(label);
	t.width = width;
	unsigned digits = 0;
	int lineno = 0;
	std::size_t pos = 0;
	while (pos <= text.size()) {
		std::size_t end = text.find('\n', pos);
		if (end == std::string_view::npos)
			end = text.size();
		std::string_view line = trim(text.substr(pos, end - pos));
		pos = end + 1;
		++lineno;
		if (auto hash = line.find('#'); hash != std::string_view::npos)
			line = trim(line.substr(0, hash));
		if (line.empty())
			continue;
		auto comma = line.find(',');
		if (comma == std::string_view::npos)
			throw ParseError("expected 'minterm_hex,count'", lineno);
		std::string_view hex = trim(line.substr(0, comma));
		std::string_view count_text = trim(line.substr(comma + 1));
		if (hex == "minterm_hex" && t.counts.empty())
			continue;
		std::uint64_t count = 0;
		auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
		if (ec != std::errc() || ptr != count_text.data() + count_text.size())
			throw ParseError("invalid count '" + std::string(count_text) + "'", lineno);
		std::string_view bare = hex.starts_with("0x") || hex.starts_with("0X") ? hex.substr(2) : hex;
		Minterm x = 0;
		try {
			x = minterm_from_hex(bare, width == 0 ? 64 : width);
		} catch (const ParseError &e) {
			throw ParseError(e.what(), lineno);
		}
		if (width == 0) {
			if (digits == 0)
				digits = static_cast<unsigned>(bare.size());
			else if (digits != bare.size())
				throw ParseError("minterm width is not uniform", lineno);
			if (digits * 4 > 32)
				throw ParseError("minterms wider than 32 bits", lineno);
		}
		t.counts[x] += count;
		t.total += count;
	}
	if (width == 0)
		t.width = digits * 4;
	if (t.total == 0)
		throw ParseError("trace has zero total count");
	return t;
}

Trace load_trace(const std::string &path, unsigned width)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw ParseError("cannot read trace file '" + path + "'");
	std::ostringstream ss;
	ss << in.rdbuf();
	return parse_trace(ss.str(), path, width);
}

Selection select_critical_minterms(const std::vector<Trace> &traces, unsigned m,
	const std::map<Minterm, double> &weights)
{
	if (!is_power_of_two(m))
		throw SpecError("m must be a power of two");
	if (traces.empty())
		throw SpecError("at least one trace is required");
	for (const auto &t : traces)
		if (t.width != traces[0].width)
			throw SpecError("traces have different minterm widths");

	std::set<Minterm> common, all;
	for (const auto &[x, c] : traces[0].counts)
		if (c > 0)
			common.insert(x);
	for (const auto &t : traces)
		for (const auto &[x, c] : t.counts)
			if (c > 0)
				all.insert(x);
	for (std::size_t i = 1; i < traces.size(); ++i)
		std::erase_if(common, [&](Minterm x) { return traces[i].count(x) == 0; });

	Selection sel;
	const std::set<Minterm> *pool = &common;
	if (common.size() < m) {
		sel.fallback = true;
		pool = &all;
		if (all.size() < m)
			throw SpecError("traces contain fewer than m = " + std::to_string(m) + " distinct minterms");
	}
	std::vector<std::pair<double, Minterm>> scored;
	for (Minterm x : *pool) {
		double sum = 0;
		for (const auto &t : traces)
			sum += static_cast<double>(t.count(x));
		auto w = weights.find(x);
		scored.emplace_back((w == weights.end() ? 1.0 : w->second) * sum, x);
	}
	std::sort(scored.begin(), scored.end(), [](const auto &a, const auto &b) {
		if (a.first != b.first)
			return a.first > b.first;
		return a.second < b.second;
	});
	for (unsigned i = 0; i < m; ++i)
		sel.minterms.push_back(scored[i].second);
	return sel;
}

double workload_error_rate(const Trace &trace, const std::vector<Minterm> &corrupted, unsigned width)
{
	if (width != trace.width)
		throw SpecError("trace width " + std::to_string(trace.width) + " does not match " + std::to_string(width));
	std::set<Minterm> unique(corrupted.begin(), corrupted.end());
	std::uint64_t hit = 0;
	for (Minterm x : unique)
		hit += trace.count(x);
	return static_cast<double>(hit) / static_cast<double>(trace.total);
}

ImpactReport workload_impact(const Trace &trace, const Circuit &locked, const Circuit &original, const BitVector &key,
	const InputDomain &inputs)
{
	ImpactReport r;
	r.key = key;
	r.corrupted = corrupted_set(locked, original, key, inputs);
	r.workload_error_rate = workload_error_rate(trace, r.corrupted, inputs.width());
	for (Minterm x : r.corrupted)
		if (auto c = trace.count(x))
			r.contributions.emplace_back(x, static_cast<double>(c) / static_cast<double>(trace.total));
	return r;
}

} // namespace saslab
