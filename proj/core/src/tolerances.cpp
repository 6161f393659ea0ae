#include "bp/tolerances.hpp"

#include "bp/errors.hpp"

#include <cstdlib>
#include <string>

namespace bp {

Tolerances Tolerances::scaled(double s) const {
    if (!(s > 0.0))
        throw ConfigError("tolerance scale must be positive");
    Tolerances t = *this;
    t.c_norm_unit *= s;
    t.eig_residual *= s;
    t.trace_rel *= s;
    t.c_orth *= s;
    t.norm_floor *= s;
    t.defective_ratio *= s;
    t.basis_orth *= s;
    t.match_tie *= s;
    t.dedup_radius *= s;
    t.loop_clearance *= s;
    t.disc_residual *= s;
    t.mixing_row_sum *= s;
    t.root_step *= s;
    t.sweep_slack *= s;
    return t;
}

const Tolerances& Tolerances::defaults() {
    static const Tolerances instance = [] {
        Tolerances t;
        if (const char* env = std::getenv("BP_TOLERANCE_SCALE")) {
            std::size_t pos = 0;
            double s = 0.0;
            try {
                s = std::stod(env, &pos);
            } catch (const std::exception&) {
                throw ConfigError(std::string("BP_TOLERANCE_SCALE is not a number: ") + env);
            }
            if (pos != std::string(env).size() || !(s > 0.0))
                throw ConfigError(std::string("BP_TOLERANCE_SCALE must be a positive number, got: ") + env);
            t = t.scaled(s);
        }
        return t;
    }();
    return instance;
}

} // namespace bp
