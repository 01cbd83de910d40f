// protocols.hpp - one realization of each detector on a pulse schedule.
#pragma once

#include <vector>

#include "ifm/noise.hpp"
#include "ifm/quantum.hpp"

namespace ifm {

enum class Protocol { Qubit, Cifm, Pifm };

const char* protocol_name(Protocol p);

/// Final level populations and the detector's marker population
/// (p_e for the qubit, p_0 for the qutrit protocols).
struct ProtocolResult {
  std::vector<double> populations;
  double marker = 0.0;

  double p(int level) const { return populations.at(level); }
};

/// Absorptive qubit: the N composed pulses act directly on the qubit.
ProtocolResult run_qubit(const PulseSchedule& schedule, const PureState& initial);

/// Coherent IFM: S, then [B_j, S] for j = 1..N.
ProtocolResult run_cifm(const PulseSchedule& schedule, const PureState& initial);

/// Projective IFM: as cIFM on a density matrix, with a |2> detection after
/// every B pulse. A detection ends the run (its probability is accumulated
/// into p2); only the no-detection branch continues.
ProtocolResult run_pifm(const PulseSchedule& schedule, const DensityMatrix& initial);

/// Runs `protocol` from its canonical initial state (|g> or |0>).
ProtocolResult run_protocol(Protocol protocol, const PulseSchedule& schedule);

}  // namespace ifm
