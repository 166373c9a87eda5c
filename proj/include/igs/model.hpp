#ifndef IGS_MODEL_HPP
#define IGS_MODEL_HPP

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "igs/errors.hpp"
#include "igs/mark_law.hpp"

namespace igs {

// One compound-Poisson source. Arrivals at rate omega; each arrival carries a
// mark Z ~ law and displaces coordinate i by theta[i] * Z. The engine applies
// the compensated form, so a source contributes zero drift.
struct JumpSource {
    double omega = 0.0;
    std::array<double, 2> theta{0.0, 0.0};
    MarkLaw law;

    void validate(int dim) const {
        if (!(omega >= 0.0) || !std::isfinite(omega))
            throw InputError("jump source: omega must be finite and >= 0");
        law.validate();
        for (int i = dim; i < 2; ++i)
            if (theta[i] != 0.0)
                throw InputError("jump source: theta set beyond model dimension");
    }
};

// First grid time at which the predicate holds stops the path.
struct ExitSpec {
    enum class Kind { None, Below, Above };
    Kind kind = Kind::None;
    int coord = 0;
    double level = 0.0;

    bool triggered(std::span<const double> x) const {
        switch (kind) {
        case Kind::None:
            return false;
        case Kind::Below:
            return x[coord] <= level;
        case Kind::Above:
            return x[coord] >= level;
        }
        return false;
    }
};

// Controlled jump-diffusion in 1 or 2 coordinates:
//   dX_i = drift_i dt + sum_j vol[i][j] dB_j + compensated jumps.
struct ModelSpec {
    int dim = 1;
    std::array<double, 2> drift{0.0, 0.0};
    std::array<std::array<double, 2>, 2> vol{{{0.0, 0.0}, {0.0, 0.0}}};
    std::vector<JumpSource> jumps;
    ExitSpec exit;

    void validate() const {
        if (dim != 1 && dim != 2) throw InputError("model: dim must be 1 or 2");
        for (int i = 0; i < dim; ++i) {
            if (!std::isfinite(drift[i])) throw InputError("model: drift must be finite");
            for (int j = 0; j < dim; ++j)
                if (!std::isfinite(vol[i][j])) throw InputError("model: vol must be finite");
        }
        for (const auto& s : jumps) s.validate(dim);
        if (exit.kind != ExitSpec::Kind::None && (exit.coord < 0 || exit.coord >= dim))
            throw InputError("model: exit coordinate out of range");
    }

    // Diffusion matrix a = vol vol^T entry.
    double diffusion(int i, int j) const {
        double s = 0.0;
        for (int k = 0; k < dim; ++k) s += vol[i][k] * vol[j][k];
        return s;
    }
};

} // namespace igs

#endif
