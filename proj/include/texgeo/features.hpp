#pragma once

// Image to signature: DTCWT decomposition, then one maximum-likelihood fit per
// subband on the coefficient magnitudes.

#include <cmath>
#include <string>
#include <vector>

#include "texgeo/distributions.hpp"
#include "texgeo/dtcwt.hpp"
#include "texgeo/errors.hpp"
#include "texgeo/image.hpp"
#include "texgeo/signature.hpp"

namespace texgeo {

/// Magnitudes at or below this count as zero.
inline constexpr double kZeroMagnitude = 1e-10;

inline Sample subband_magnitudes(const SubbandSet& s, int level, int orientation) {
  if (level < 0 || level >= s.levels || orientation < 0 || orientation >= kOrientations)
    throw DomainError("subband index out of range");
  const auto& band = s.subband(level, orientation);
  std::vector<double> mags;
  mags.reserve(band.data.size());
  for (const auto& z : band.data) {
    const double m = std::abs(z);
    if (m > kZeroMagnitude) mags.push_back(m);
  }
  const std::size_t zeros = band.data.size() - mags.size();
  if (mags.empty() || 2 * zeros > band.data.size())
    throw DegenerateSubband(std::to_string(zeros) + " of " + std::to_string(band.data.size()) +
                            " coefficients are zero");
  return Sample(std::move(mags));
}

namespace detail {

inline std::string subband_tag(int level, int orientation) {
  return "subband (level " + std::to_string(level + 1) + ", orientation " + std::to_string(orientation) + "): ";
}

template <class Fn>
auto annotated(int level, int orientation, Fn&& fn) {
  try {
    return fn();
  } catch (const DegenerateSubband& e) {
    throw DegenerateSubband(subband_tag(level, orientation) + e.what());
  } catch (const DegenerateSample& e) {
    throw DegenerateSample(subband_tag(level, orientation) + e.what());
  } catch (const NoConvergence& e) {
    throw NoConvergence(subband_tag(level, orientation) + e.what());
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(subband_tag(level, orientation) + e.what());
  } catch (const DomainError& e) {
    throw DomainError(subband_tag(level, orientation) + e.what());
  }
}

}  // namespace detail

inline Vec2 fit_subband(const Sample& s, Family family, const MleOptions& opt = {}) {
  if (family == Family::Gamma) {
    const auto p = gamma_mle(s, opt);
    return {p.alpha, p.beta};
  }
  const auto p = weibull_mle(s, opt);
  return {p.lambda, p.mu};
}

inline Signature signature_from_subbands(const SubbandSet& s, Family family, const MleOptions& opt = {}) {
  std::vector<Vec2> params;
  params.reserve(static_cast<std::size_t>(kOrientations * s.levels));
  for (int level = 0; level < s.levels; ++level)
    for (int o = 0; o < kOrientations; ++o)
      params.push_back(detail::annotated(level, o, [&] { return fit_subband(subband_magnitudes(s, level, o), family, opt); }));
  return Signature(family, s.levels, std::move(params));
}

inline Signature extract_signature(const GrayImage& img, Family family, int levels, const MleOptions& opt = {}) {
  return signature_from_subbands(dtcwt_forward(img, levels), family, opt);
}

}  // namespace texgeo
