#pragma once

#include "atomflux/constants.hpp"
#include "atomflux/wavepacket.hpp"

namespace bench {

inline atomflux::FieldSetup field(double detuning = 0.0) {
    return {2.2e-25, detuning, 650.5 * atomflux::pi * 0.01 / 1e-4, 0.0, 1e-4};
}

inline atomflux::PacketSpec spec() {
    return atomflux::PacketSpec::from_velocity(2.2e-25, 0.01, 20e-6, -120.4e-6);
}

inline const atomflux::SpectralPacket& packet() {
    static const atomflux::SpectralPacket p = atomflux::build_packet(field(), spec());
    return p;
}

}  // namespace bench
