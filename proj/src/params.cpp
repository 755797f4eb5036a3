#include "fallowopt/params.hpp"

#include <cmath>
#include <string>

#include "fallowopt/errors.hpp"

namespace fallowopt {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw InvalidInput(std::string("invalid model parameters: ") + what);
}

}  // namespace

void ModelParams::validate() const {
    for (double v : {beta, a, alpha, gamma, mu, omega, delta, rho, cap_k, d, cap_d, q, s0, p0, m, c}) {
        require(std::isfinite(v), "all parameters must be finite");
        require(v >= 0.0, "rates, masses, durations and costs must be >= 0");
    }
    require(cap_k > 0.0, "K > 0");
    require(delta > 0.0, "delta > 0");
    require(gamma <= 1.0, "0 <= gamma <= 1");
    require(q <= 1.0, "0 <= q <= 1");
    require(d > 0.0 && d < cap_d, "0 < d < D");
    require(s0 > 0.0 && s0 <= cap_k, "0 < S0 <= K");
}

}  // namespace fallowopt
