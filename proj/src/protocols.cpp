#include "ifm/protocols.hpp"

#include "ifm/pulses.hpp"

namespace ifm {
const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::Qubit: return "qubit";
    case Protocol::Cifm: return "cifm";
    case Protocol::Pifm: return "pifm";
  }
  return "?";
}

ProtocolResult run_qubit(const PulseSchedule& schedule, const PureState& initial) {
  require_dim("run_qubit", kQubit, initial.dim());
  schedule.validate();
  Vec psi = initial.amplitudes();
  for (const auto& pulse : schedule.pulses) psi = composed_block(pulse) * psi;
  ProtocolResult r;
  r.populations = populations(PureState::unchecked(psi));
  r.marker = r.populations[1];
  return r;
}

ProtocolResult run_cifm(const PulseSchedule& schedule, const PureState& initial) {
  require_dim("run_cifm", kQutrit, initial.dim());
  schedule.validate();
  const Mat s = beam_splitter({schedule.timing.slots}).matrix();
  Vec psi = s * initial.amplitudes();
  for (const auto& pulse : schedule.pulses) {
    psi.tail<2>() = composed_block(pulse) * psi.tail<2>();
    psi = s * psi;
  }
  ProtocolResult r;
  r.populations = populations(PureState::unchecked(psi));
  r.marker = r.populations[0];
  return r;
}

ProtocolResult run_pifm(const PulseSchedule& schedule, const DensityMatrix& initial) {
  require_dim("run_pifm", kQutrit, initial.dim());
  schedule.validate();
  const Mat s = beam_splitter({schedule.timing.slots}).matrix();
  Mat rho = s * initial.matrix() * s.adjoint();
  double absorbed = 0.0;
  for (const auto& pulse : schedule.pulses) {
    const Mat b = embed_upper(composed_block(pulse));
    AbsorptionSplit split = split_on_absorption(b * rho * b.adjoint());
    absorbed += split.click_probability;
    rho = s * split.no_click * s.adjoint();
  }
  ProtocolResult r;
  r.populations = {rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real() + absorbed};
  r.marker = r.populations[0];
  return r;
}

ProtocolResult run_protocol(Protocol protocol, const PulseSchedule& schedule) {
  switch (protocol) {
    case Protocol::Qubit: return run_qubit(schedule, PureState::basis(kQubit, 0));
    case Protocol::Cifm: return run_cifm(schedule, PureState::basis(kQutrit, 0));
    case Protocol::Pifm:
      return run_pifm(schedule, DensityMatrix::from_pure(PureState::basis(kQutrit, 0)));
  }
  throw InvalidArgument("run_protocol: unknown protocol");
}

}  // namespace ifm
