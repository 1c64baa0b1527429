#pragma once

#include "saslab/attacks.hpp"
#include "saslab/bits.hpp"
#include "saslab/locking.hpp"
#include "saslab/metrics.hpp"
#include "saslab/workload.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace saslab {

using Json = nlohmann::ordered_json;

std::string read_text_file(const std::string &path);
/// Throws ParseError when the file cannot be written.
void write_text_file(const std::string &path, const std::string &text);

/// Parsed spec document. The scheme comes from the "scheme" field when present.
struct SpecDocument {
	std::optional<Scheme> scheme;
	std::variant<SasSpec, SfllSpec> spec;
};

/**
 * Spec JSON, fields named as in SasSpec / SfllSpec, minterms as fixed-width hex.
 * A SAS spec may list only "critical_minterms"; its partition is then built
 * from "seed" (or `fallback_seed`), and SpecError is thrown when neither is set.
 */
SpecDocument parse_spec(const Json &doc, std::optional<std::uint64_t> fallback_seed = std::nullopt);
SpecDocument load_spec(const std::string &path, std::optional<std::uint64_t> fallback_seed = std::nullopt);
Json parse_json_text(const std::string &text);

Json to_json(const SasSpec &spec);
Json to_json(const SfllSpec &spec);
Json to_json(Scheme scheme, const std::variant<SasSpec, SfllSpec> &spec);

/// Key file: one hex string, MSB = keyinput0, right-aligned in ceil(bits/4) digits.
BitVector parse_key(std::string_view text, std::size_t bits);
BitVector load_key(const std::string &path, std::size_t bits);
std::string format_key(const BitVector &key);

Json to_json(const Rational &r);
Json to_json(const Estimate &e);
Json to_json(const ErrorProfile &profile);
/// minterm_hex,corrupting_keys,wrong_keys,ier_num,ier_den
std::string ier_csv(const ErrorProfile &profile);

Json to_json(const AttackResult &result);
Json to_json(const IterationStats &stats);
Json to_json(const ImpactReport &report, unsigned width);

} // namespace saslab
