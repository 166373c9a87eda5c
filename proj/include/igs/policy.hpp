#ifndef IGS_POLICY_HPP
#define IGS_POLICY_HPP

#include <cmath>

#include "igs/errors.hpp"

namespace igs {

// Impulses are additive displacements of one coordinate.
inline double apply_impulse(double state, double z) { return state + z; }

// Stationary one-coordinate band policy: when the watched coordinate crosses
// the trigger (from the stated direction), move it to the retarget level.
// The retarget must lie strictly on the continuation side of the trigger,
// otherwise the policy re-fires every step and is inadmissible.
struct ThresholdPolicy {
    enum class Direction { InterveneWhenAbove, InterveneWhenBelow };

    int player = 0; // 0-based; at most one policy per player
    int coord = 0;
    double trigger = 0.0;
    double retarget = 0.0;
    double lambda = 0.0; // proportional cost coefficient
    double kappa = 0.0;  // fixed cost, strictly positive
    Direction direction = Direction::InterveneWhenAbove;

    bool triggered(double x) const {
        return direction == Direction::InterveneWhenAbove ? x >= trigger : x <= trigger;
    }

    double cost_of(double z) const { return lambda * z + kappa; }

    void validate() const {
        if (player < 0 || player > 1) throw InputError("policy: player must be 0 or 1");
        if (!(kappa > 0.0)) throw InputError("policy: kappa must be > 0 (fixed cost is strictly positive)");
        if (!(lambda >= 0.0)) throw InputError("policy: lambda must be >= 0");
        if (!std::isfinite(trigger) || !std::isfinite(retarget))
            throw InputError("policy: levels must be finite");
        if (direction == Direction::InterveneWhenAbove && !(retarget < trigger))
            throw InputError("policy: intervene-when-above requires retarget < trigger");
        if (direction == Direction::InterveneWhenBelow && !(retarget > trigger))
            throw InputError("policy: intervene-when-below requires retarget > trigger");
    }

    // Bypasses validation. Exists so the admissibility detector can be pointed
    // at degenerate policies (e.g. retarget == trigger) on purpose.
    static ThresholdPolicy unchecked(int player, int coord, double trigger, double retarget,
                                     double lambda, double kappa, Direction dir) {
        ThresholdPolicy p;
        p.player = player;
        p.coord = coord;
        p.trigger = trigger;
        p.retarget = retarget;
        p.lambda = lambda;
        p.kappa = kappa;
        p.direction = dir;
        return p;
    }
};

} // namespace igs

#endif
