#pragma once

// Channel files and named channel specifications.
//
// File schema (JSON, complex numbers as [re, im], matrices row-major):
//   {"d_in": 2, "d_out": 2, "kraus": [K_0, K_1, ...]}
//   {"d_in": 2, "d_out": 2, "choi": J}
// Exactly one of "kraus" and "choi" must be present.
//
// Named specifications, usable wherever a channel file is expected:
//   named:identity:d                 named:depolarizing:d
//   named:transpose:nu               named:t_family:nu:p
//   named:amplitude_damping:gamma    named:phase:theta
//   named:weyl_mix:nu                named:random_unitary_mix:nu:mu:seed
//   named:random:d_in:d_out:rank:seed

#include <string>

#include <json.hpp>

#include "qchan/channels.hpp"

namespace qchan {

using Json = nlohmann::json;

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

/// Kraus form for channels; the Choi form is always available.
Json channel_to_json(const Channel& t, bool as_choi = false);
Json map_to_json(const LinearMap& m);

/// Parses either schema without checking complete positivity.
/// Throws Error(ParseError) on schema violations.
LinearMap map_from_json(const Json& j);
/// Parses and validates; throws Error(NotCPTP) (or NotCP) naming the failure.
Channel channel_from_json(const Json& j, double tol = kValidationTol);

/// A file path or a "named:" specification.
LinearMap load_map(const std::string& source);
Channel load_channel(const std::string& source, double tol = kValidationTol);
void save_channel(const std::string& path, const Channel& t, bool as_choi = false);

LinearMap parse_named(const std::string& spec);

}  // namespace qchan
