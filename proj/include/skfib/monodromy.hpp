// Monodromy of weight-one polarized variations: quasi-unipotency orders,
// base change to unipotent generators, and the weight filtration
//   W0 = sum Im N_i  subset  W1 = cap ker N_i = W0^perp,
// all in exact integer/rational arithmetic.
#pragma once

#include <vector>

#include "skfib/errors.hpp"
#include "skfib/rational.hpp"
#include "skfib/symplectic.hpp"

namespace skfib {

struct MonodromyRep {
    std::vector<RatMat> generators; // integer matrices
    PolarizedSymplecticForm form;
    PolarizationType d;

    MonodromyRep(std::vector<RatMat> gens, PolarizedSymplecticForm f, PolarizationType dd)
        : generators(std::move(gens)), form(std::move(f)), d(std::move(dd)) {
        validate();
    }

    int dim() const { return form.dim(); }

    void validate() const {
        if (generators.empty()) throw shape_error("MonodromyRep: no generators");
        for (const auto& T : generators) {
            if (T.rows() != dim() || T.cols() != dim()) throw shape_error("MonodromyRep: generator dimension mismatch");
            if (!T.is_integer()) throw model_error("MonodromyRep: generators must be integral");
            if (!symplectic_check(T, form)) throw model_error("MonodromyRep: generator does not preserve the form");
        }
        for (size_t a = 0; a < generators.size(); ++a)
            for (size_t b = a + 1; b < generators.size(); ++b)
                if (generators[a] * generators[b] != generators[b] * generators[a])
                    throw model_error("MonodromyRep: generators do not commute");
    }
};

struct UnipotentReduction {
    std::vector<int> orders;   // m_i: smallest power with (T^m - I)^2 = 0
    MonodromyRep reduced;      // generators T_i^{m_i}
};

inline bool squared_difference_vanishes(const RatMat& T) {
    RatMat N = T - RatMat::identity(T.rows());
    return (N * N).is_zero();
}

// Quasi-unipotency: find the smallest m_i <= bound with (T_i^{m_i} - I)^2 = 0
// and return the base-changed representation on those powers.
inline UnipotentReduction reduce_to_unipotent(const MonodromyRep& rep, int bound = 60) {
    std::vector<int> orders;
    std::vector<RatMat> powers;
    for (const auto& T : rep.generators) {
        RatMat P = T;
        int m = 1;
        bool found = false;
        for (; m <= bound; ++m) {
            if (squared_difference_vanishes(P)) {
                found = true;
                break;
            }
            P = P * T;
        }
        if (!found)
            throw model_error("reduce_to_unipotent: generator is not quasi-unipotent within the order bound");
        orders.push_back(m);
        powers.push_back(P);
    }
    return UnipotentReduction{orders, MonodromyRep(std::move(powers), rep.form, rep.d)};
}

struct WeightFiltration {
    RatMat W0; // column basis of sum Im N_i
    RatMat W1; // column basis of cap ker N_i
    RatMat L;  // Lagrangian with W0 subset L subset W1
};

// Weight filtration of a commuting unipotent representation with N^2 = 0.
// Checks W1 = W0^perp exactly and extends W0 to a Lagrangian inside W1.
inline WeightFiltration weight_filtration(const MonodromyRep& rep) {
    const int dim = rep.dim();
    RatMat images(dim, 0);
    RatMat stacked(0, dim);
    for (const auto& T : rep.generators) {
        if (!squared_difference_vanishes(T))
            throw model_error("weight_filtration: generator is not unipotent with (T - I)^2 = 0");
        RatMat N = T - RatMat::identity(dim);
        images = images.hcat(N);
        stacked = stacked.vcat(N);
    }
    WeightFiltration f;
    f.W0 = images.column_space();
    f.W1 = stacked.kernel();

    RatMat W0perp = (f.W0.transpose() * rep.form.omega).kernel();
    if (!subspace_equal(f.W1, W0perp))
        throw constraint_error("weight_filtration: W1 is not the symplectic orthogonal of W0 "
                               "(polarization incompatible with the monodromy)");
    f.L = detail::extend_to_lagrangian(rep.form, f.W0, f.W1);
    return f;
}

// Full pipeline: orders, unipotent generators, filtration and an adapted
// symplectic basis with span(v_{n+1}..v_{2n}) containing W0.
struct MonodromyAnalysis {
    UnipotentReduction reduction;
    WeightFiltration filtration;
    RatMat adapted_basis;
};

inline MonodromyAnalysis analyze_monodromy(const MonodromyRep& rep, int bound = 60) {
    MonodromyAnalysis a{reduce_to_unipotent(rep, bound), {}, {}};
    a.filtration = weight_filtration(a.reduction.reduced);
    a.adapted_basis = symplectic_reduction(rep.form, rep.d, a.filtration.W0, a.filtration.W1);
    return a;
}

} // namespace skfib
