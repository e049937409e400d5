#pragma once

#include "r1mi/prior.hpp"

namespace r1mi {

// J(A, B) = log sum_k w_k exp(B s_k - A s_k^2 / 2), evaluated with
// max-subtraction so arguments with |B * s_k| up to ~700 do not overflow.
double j_func(const Prior& p, double A, double B);

// Posterior mean of x under the tilted measure w_k exp(B s_k - A s_k^2/2);
// equals dJ/dB.
double denoiser(const Prior& p, double A, double B);

// Posterior variance under the same measure; equals d^2 J / dB^2 and the
// B-derivative of the denoiser. Nonnegative.
double denoiser_variance(const Prior& p, double A, double B);

}  // namespace r1mi
