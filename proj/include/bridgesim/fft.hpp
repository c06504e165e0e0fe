#pragma once

#include <vector>

#include "bridgesim/util.hpp"

namespace bridgesim {

// Thin FFTW wrapper with a process-wide plan cache.
//
// Plans are created with FFTW_ESTIMATE so plan selection is deterministic
// (FFTW_MEASURE times candidate algorithms and can pick differently from
// run to run, which would break bit-identical reproducibility), and with
// FFTW_UNALIGNED so one cached plan serves any caller buffer through the
// new-array execute interface. Plan creation is serialized behind a mutex;
// execution is thread safe.
std::vector<cplx> fft(const std::vector<cplx>& in);   // unscaled forward
std::vector<cplx> ifft(const std::vector<cplx>& in);  // scaled by 1/N

}  // namespace bridgesim
