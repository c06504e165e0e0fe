#pragma once

#include <functional>
#include <vector>

#include "bridgesim/types.hpp"

namespace bridgesim {

// Whole-frame frequency-domain helpers. Frames are treated as periodic;
// transmit payloads are constructed periodic (integer number of payload
// cycles, circular shaping), so these operations are exact for them.

// natural-order DFT bin frequency in Hz (bin k of an n-point transform)
double bin_freq(std::size_t k, std::size_t n, double fs);

// multiply by exp(+j 2 pi df t); exact, works for off-grid df
void freq_shift_inplace(ComplexFrame& frame, double df);
ComplexFrame freq_shift(const ComplexFrame& frame, double df);

// circular spectral roll by an integer number of bins (exact for periodic
// frames, used for coarse pilot centering)
ComplexFrame bin_shift(const ComplexFrame& frame, long bins);

// snap a frequency to the frame's DFT grid
double snap_to_bin(double f, std::size_t n, double fs);

// apply a transfer function evaluated at absolute frequency
// (relative bin frequency + frame.center_offset)
ComplexFrame apply_response(const ComplexFrame& frame,
                            const std::function<cplx(double)>& h_abs);

// brick-wall or Gaussian band selection around relative frequency 0;
// bw is the full (two-sided) width. For the Gaussian, bw is the two-sided
// 3 dB width of |H|.
enum class FilterShape { brickwall, gaussian };
ComplexFrame band_select(const ComplexFrame& frame, double bw,
                         FilterShape shape);

// circular convolution with a real FIR (FFT overlap-free, frame periodic);
// the filter's (taps-1)/2 group delay is left in place for the frame-level
// synchronizer to absorb
ComplexFrame circular_filter(const ComplexFrame& frame,
                             const std::vector<double>& taps);

// FFT resampling to a new rate; output length is n * new_rate / rate which
// must land on an integer (checked). Exact for band-limited periodic frames.
ComplexFrame resample(const ComplexFrame& frame, double new_rate);

// index of the strongest DFT bin with |bin frequency| <= search_hz,
// returned as a signed bin offset from DC
long strongest_bin(const ComplexFrame& frame, double search_hz);

}  // namespace bridgesim
