#pragma once

namespace fallowopt {

/// Biological and economic constants of the banana / burrowing-nematode model.
///
/// Units: time in days, biomass in grams, money in XAF.
struct ModelParams {
    double beta = 0.1;       ///< infestation rate of free pests (per nematode per gram per day)
    double a = 2e-4;         ///< consumption rate of infesting pests (g/day)
    double alpha = 400.0;    ///< conversion rate of ingested roots (per gram)
    double gamma = 0.5;      ///< fraction of eggs laid inside the roots
    double mu = 0.04;        ///< mortality of infesting pests (per day)
    double omega = 0.0495;   ///< mortality of free pests (per day)
    double delta = 60.0;     ///< half-saturation constant (g)
    double rho = 0.025;      ///< root growth rate (per day)
    double cap_k = 150.0;    ///< maximum root biomass K (g)
    double d = 210.0;        ///< root growth duration, planting to flowering (days)
    double cap_d = 330.0;    ///< cropping season duration D (days)
    double q = 0.05;         ///< fraction of infesting pests released at uprooting
    double s0 = 60.0;        ///< root biomass of a new sucker (g)
    double p0 = 100.0;       ///< initial soil infestation
    double m = 0.3;          ///< root-to-yield conversion (XAF per gram per day)
    double c = 230.0;        ///< cost of a healthy sucker (XAF)

    /// Reference parameter set (the defaults above).
    static ModelParams reference() { return {}; }

    /// Throws InvalidInput naming the first violated constraint.
    void validate() const;
};

}  // namespace fallowopt
