#include "noqe/resources.h"

#include "noqe/noise.h"

namespace noqe {

GateCensus resource_report(const Circuit &c) {
    GateCensus out;
    for (const auto &g : c.gates) {
        out.depth_gates++;
        out.by_kind[std::string(gate_name(g.kind))]++;
        if (g.arity() == 1) {
            out.one_qubit++;
            continue;
        }
        auto natives = static_cast<uint64_t>(native_two_qubit_count(g.kind));
        out.two_qubit += natives;
        out.one_qubit += kDressingPerNative * natives;
    }
    return out;
}

}  // namespace noqe
