#ifndef NOQE_RESOURCES_H
#define NOQE_RESOURCES_H

#include <map>
#include <string>

#include "noqe/circuit.h"

namespace noqe {

/// Gate census after compiling to native gates.
///
/// Two-qubit natives: CNOT, CZ and CRZ take one, GIVENS two, a generic U2Q
/// three, CSWAP seven. One-qubit count: every one-qubit gate counts once and
/// every native two-qubit interaction carries two single-qubit dressing
/// rotations.
struct GateCensus {
    uint64_t two_qubit = 0;
    uint64_t one_qubit = 0;
    uint64_t depth_gates = 0;  // gates as written, before compilation
    std::map<std::string, uint64_t> by_kind;
};

inline constexpr int kDressingPerNative = 2;

GateCensus resource_report(const Circuit &c);

}  // namespace noqe

#endif
