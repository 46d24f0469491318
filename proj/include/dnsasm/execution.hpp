#pragma once

namespace dnsasm {

/// Parallel kernels keep their serial loop as the reference path; both must
/// produce identical results.
enum class Execution { serial, parallel };

}  // namespace dnsasm
