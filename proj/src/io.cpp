#include "saslab/io.hpp"

#include "saslab/errors.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace saslab {

std::string read_text_file(const std::string &path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw ParseError("cannot read '" + path + "'");
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

void write_text_file(const std::string &path, const std::string &text)
{
	std::ofstream out(path, std::ios::binary);
	if (!out || !(out << text))
		throw ParseError("cannot write '" + path + "'");
}

Json parse_json_text(const std::string &text)
{
	try {
		return Json::parse(text);
	} catch (const Json::parse_error &e) {
		throw ParseError(std::string("invalid JSON: ") + e.what());
	}
}

namespace {

// Missing keys and wrong types are spec problems, not syntax problems.
template <typename T>
T field(const Json &doc, const char *name)
{
	if (!doc.contains(name))
		throw SpecError(std::string("spec is missing \"") + name + "\"");
	try {
		return doc.at(name).get<T>();
	} catch (const Json::exception &) {
		throw SpecError(std::string("spec field \"") + name + "\" has the wrong type");
	}
}

template <typename T>
T field_or(const Json &doc, const char *name, T fallback)
{
	return doc.contains(name) ? field<T>(doc, name) : fallback;
}

Minterm hex_field(const Json &value, unsigned width, const char *what)
{
	if (!value.is_string())
		throw SpecError(std::string(what) + " must be a hex string");
	try {
		return minterm_from_hex(value.get<std::string>(), width);
	} catch (const ParseError &e) {
		throw SpecError(std::string(what) + ": " + e.what());
	}
}

std::vector<Minterm> hex_list(const Json &value, unsigned width, const char *what)
{
	if (!value.is_array())
		throw SpecError(std::string(what) + " must be an array");
	std::vector<Minterm> out;
	for (const auto &v : value)
		out.push_back(hex_field(v, width, what));
	return out;
}

Json hex_array(const std::vector<Minterm> &values, unsigned width)
{
	Json a = Json::array();
	for (Minterm v : values)
		a.push_back(minterm_to_hex(v, width));
	return a;
}

unsigned checked_width(const Json &doc)
{
	auto n = field<unsigned>(doc, "n");
	if (n == 0 || n > 32)
		throw SpecError("n must be in [1, 32]");
	return n;
}

SasSpec parse_sas(const Json &doc, bool antisat, std::optional<std::uint64_t> fallback_seed)
{
	unsigned n = checked_width(doc);
	Minterm x_g = doc.contains("x_g") ? hex_field(doc["x_g"], n, "x_g") : 0;
	auto slice = field_or<std::vector<std::string>>(doc, "input_slice", {});
	if (antisat) {
		std::string wire;
		if (doc.contains("insertion_wire"))
			wire = field<std::string>(doc, "insertion_wire");
		else if (doc.contains("insertion_wires")) {
			auto wires = field<std::vector<std::string>>(doc, "insertion_wires");
			if (wires.size() > 1)
				throw SpecError("Anti-SAT takes one insertion wire");
			if (!wires.empty())
				wire = wires[0];
		}
		return make_antisat_spec(n, x_g, wire, slice);
	}
	auto wires = field_or<std::vector<std::string>>(doc, "insertion_wires", {});
	if (doc.contains("blocks") || doc.contains("k1_sets")) {
		SasSpec s;
		s.n = n;
		s.m = field<unsigned>(doc, "m");
		s.l = field<unsigned>(doc, "l");
		s.x_g = x_g;
		s.polarity_mask = doc.contains("polarity_mask") ? hex_field(doc["polarity_mask"], n, "polarity_mask") : 0;
		const Json &blocks = doc.at("blocks");
		if (!blocks.is_array())
			throw SpecError("blocks must be an array");
		for (const auto &b : blocks)
			s.blocks.push_back(hex_list(b, n, "blocks"));
		if (!doc.contains("k1_sets"))
			throw SpecError("spec is missing \"k1_sets\"");
		const Json &sets = doc.at("k1_sets");
		if (!sets.is_array())
			throw SpecError("k1_sets must be an array");
		for (const auto &per_block : sets) {
			if (!per_block.is_array())
				throw SpecError("k1_sets must be nested arrays");
			auto &out = s.k1_sets.emplace_back();
			for (const auto &set : per_block)
				out.push_back(hex_list(set, n, "k1_sets"));
		}
		s.insertion_wires = std::move(wires);
		s.input_slice = std::move(slice);
		s.finalize();
		return s;
	}
	auto l = field<unsigned>(doc, "l");
	auto critical = hex_list(field<Json>(doc, "critical_minterms"), n, "critical_minterms");
	if (doc.contains("m") && field<unsigned>(doc, "m") != critical.size())
		throw SpecError("m does not match the number of critical minterms");
	if (doc.contains("polarity_mask") && hex_field(doc["polarity_mask"], n, "polarity_mask") != 0)
		throw SpecError("only polarity_mask 0 is supported");
	std::optional<std::uint64_t> seed = fallback_seed;
	if (doc.contains("seed"))
		seed = field<std::uint64_t>(doc, "seed");
	if (!seed)
		throw SpecError("a seed is required to build the K1 partition");
	return make_sas_spec(n, std::move(critical), l, x_g, *seed, std::move(wires), std::move(slice));
}

SfllSpec parse_sfll(const Json &doc)
{
	SfllSpec s;
	s.n = checked_width(doc);
	s.k = field<unsigned>(doc, "k");
	const Json &cubes = field<Json>(doc, "cubes");
	if (!cubes.is_array())
		throw SpecError("cubes must be an array");
	for (const auto &cube : cubes) {
		if (!cube.is_object())
			throw SpecError("each cube must be an object with value and care");
		s.cubes.push_back({hex_field(field<Json>(cube, "value"), s.n, "cube value"),
			hex_field(field<Json>(cube, "care"), s.n, "cube care")});
	}
	s.c = doc.contains("c") ? field<unsigned>(doc, "c") : static_cast<unsigned>(s.cubes.size());
	s.insertion_wire = field_or<std::string>(doc, "insertion_wire", {});
	s.input_slice = field_or<std::vector<std::string>>(doc, "input_slice", {});
	s.validate();
	return s;
}

} // namespace

SpecDocument parse_spec(const Json &doc, std::optional<std::uint64_t> fallback_seed)
{
	if (!doc.is_object())
		throw SpecError("spec must be a JSON object");
	SpecDocument out;
	if (doc.contains("scheme")) {
		auto text = field<std::string>(doc, "scheme");
		out.scheme = parse_scheme(text);
		if (!out.scheme)
			throw SpecError("unknown scheme '" + text + "'");
	}
	bool sfll = out.scheme ? *out.scheme == Scheme::SfllFlex : doc.contains("cubes");
	if (sfll) {
		out.spec = parse_sfll(doc);
		return out;
	}
	bool antisat = out.scheme ? *out.scheme == Scheme::AntiSat
	                          : !doc.contains("m") && !doc.contains("critical_minterms") && !doc.contains("blocks");
	out.spec = parse_sas(doc, antisat, fallback_seed);
	return out;
}

SpecDocument load_spec(const std::string &path, std::optional<std::uint64_t> fallback_seed)
{
	return parse_spec(parse_json_text(read_text_file(path)), fallback_seed);
}

Json to_json(const SasSpec &s)
{
	Json j;
	j["n"] = s.n;
	if (s.is_antisat()) {
		j["x_g"] = minterm_to_hex(s.x_g, s.n);
		j["insertion_wire"] = s.insertion_wires.empty() ? "" : s.insertion_wires[0];
		j["input_slice"] = s.input_slice;
		return j;
	}
	j["m"] = s.m;
	j["l"] = s.l;
	j["x_g"] = minterm_to_hex(s.x_g, s.n);
	j["polarity_mask"] = minterm_to_hex(s.polarity_mask, s.n);
	j["critical_minterms"] = hex_array(s.critical_minterms(), s.n);
	Json blocks = Json::array();
	for (const auto &b : s.blocks)
		blocks.push_back(hex_array(b, s.n));
	j["blocks"] = std::move(blocks);
	Json sets = Json::array();
	for (const auto &per_block : s.k1_sets) {
		Json pb = Json::array();
		for (const auto &set : per_block)
			pb.push_back(hex_array(set, s.n));
		sets.push_back(std::move(pb));
	}
	j["k1_sets"] = std::move(sets);
	j["insertion_wires"] = s.insertion_wires;
	j["input_slice"] = s.input_slice;
	return j;
}

Json to_json(const SfllSpec &s)
{
	Json j;
	j["n"] = s.n;
	j["c"] = s.c;
	j["k"] = s.k;
	Json cubes = Json::array();
	for (const auto &cube : s.cubes)
		cubes.push_back({{"value", minterm_to_hex(cube.value, s.n)}, {"care", minterm_to_hex(cube.care, s.n)}});
	j["cubes"] = std::move(cubes);
	j["insertion_wire"] = s.insertion_wire;
	j["input_slice"] = s.input_slice;
	return j;
}

Json to_json(Scheme scheme, const std::variant<SasSpec, SfllSpec> &spec)
{
	Json body = std::visit([](const auto &s) { return to_json(s); }, spec);
	Json j;
	j["scheme"] = std::string(to_string(scheme));
	for (auto &[key, value] : body.items())
		j[key] = value;
	return j;
}

BitVector parse_key(std::string_view text, std::size_t bits)
{
	while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
		text.remove_suffix(1);
	while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
		text.remove_prefix(1);
	if (text.starts_with("0x") || text.starts_with("0X"))
		text.remove_prefix(2);
	if (text.empty())
		throw ParseError("empty key");
	return BitVector::from_hex(text, bits);
}

BitVector load_key(const std::string &path, std::size_t bits)
{
	return parse_key(read_text_file(path), bits);
}

std::string format_key(const BitVector &key)
{
	return key.to_hex();
}

Json to_json(const Rational &r)
{
	return {{"num", boost::multiprecision::numerator(r).str()}, {"den", boost::multiprecision::denominator(r).str()}};
}

Json to_json(const Estimate &e)
{
	return {{"hits", e.hits}, {"trials", e.trials}, {"value", e.value}, {"ci95", {e.lo, e.hi}}};
}

namespace {

// Per-key tables are listed only for small key domains.
constexpr std::uint64_t kMaxListedKeys = 4096;

} // namespace

Json to_json(const ErrorProfile &p)
{
	unsigned w = p.input_width();
	Json j;
	j["input_names"] = p.input_names;
	j["key_base"] = format_key(p.keys.base);
	j["key_bits"] = p.keys.bits;
	j["key_count"] = p.keys.size();
	j["minterm_count"] = p.minterm_count();
	j["wrong_keys"] = p.wrong_keys;
	if (p.wrong_keys > 0) {
		auto t2 = average_identity(p);
		j["e_w"] = to_json(t2.e_w);
		j["gamma"] = to_json(t2.gamma);
		j["identity_holds"] = t2.equal;
	}
	std::map<std::uint32_t, std::uint64_t> histogram;
	for (auto c : p.key_corruptions)
		++histogram[c];
	Json hist = Json::array();
	for (auto [c, count] : histogram)
		hist.push_back({{"corrupted_minterms", c}, {"keys", count}});
	j["ker_histogram"] = std::move(hist);
	if (p.keys.size() <= kMaxListedKeys) {
		Json ker = Json::array();
		for (std::uint64_t i = 0; i < p.keys.size(); ++i)
			ker.push_back({{"key", format_key(p.keys.key(i))}, {"corrupted_minterms", p.key_corruptions[i]}});
		j["ker"] = std::move(ker);
	}
	Json ier = Json::array();
	for (Minterm x = 0; x < p.minterm_count(); ++x) {
		Json row{{"minterm", minterm_to_hex(x, w)}, {"corrupting_keys", p.minterm_corruptions[x]}};
		if (p.wrong_keys > 0)
			row["ier"] = to_json(p.ier(x));
		ier.push_back(std::move(row));
	}
	j["ier"] = std::move(ier);
	return j;
}

std::string ier_csv(const ErrorProfile &p)
{
	std::ostringstream out;
	out << "minterm_hex,corrupting_keys,wrong_keys,ier_num,ier_den\n";
	for (Minterm x = 0; x < p.minterm_count(); ++x) {
		out << minterm_to_hex(x, p.input_width()) << ',' << p.minterm_corruptions[x] << ',' << p.wrong_keys << ',';
		if (p.wrong_keys > 0) {
			Rational r = p.ier(x);
			out << boost::multiprecision::numerator(r) << ',' << boost::multiprecision::denominator(r);
		} else
			out << ",";
		out << '\n';
	}
	return out.str();
}

Json to_json(const AttackResult &r)
{
	Json j;
	j["recovered_key"] = format_key(r.recovered_key);
	j["iterations"] = r.iterations;
	j["termination"] = std::string(to_string(r.termination));
	j["oracle_queries"] = r.oracle_queries;
	j["input_names"] = r.input_names;
	Json log = Json::array();
	for (const auto &d : r.di_log)
		log.push_back({{"inputs", d.inputs.to_hex()}, {"outputs", d.outputs.to_hex()}});
	j["di_log"] = std::move(log);
	return j;
}

Json to_json(const IterationStats &s)
{
	Json j;
	j["trials"] = s.trials;
	j["mean"] = s.mean;
	j["variance"] = s.variance;
	j["std_error"] = s.std_error;
	j["min"] = s.min;
	j["max"] = s.max;
	return j;
}

Json to_json(const ImpactReport &r, unsigned width)
{
	Json j;
	j["key"] = format_key(r.key);
	j["corrupted"] = hex_array(r.corrupted, width);
	j["workload_error_rate"] = r.workload_error_rate;
	Json contrib = Json::array();
	for (auto [x, share] : r.contributions)
		contrib.push_back({{"minterm", minterm_to_hex(x, width)}, {"share", share}});
	j["contributions"] = std::move(contrib);
	return j;
}

} // namespace saslab
