// Error taxonomy shared by all modules.
#pragma once

#include <stdexcept>
#include <string>

namespace skfib {

// Dimension / shape mismatch between inputs.
struct shape_error : std::invalid_argument {
    explicit shape_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// A point or parameter left the region where the structure is defined
// (e.g. Im Z not positive definite).  Carries the offending eigenvalue
// when one is available.
struct domain_error : std::runtime_error {
    double min_eigenvalue;
    explicit domain_error(const std::string& msg, double min_eig = 0.0)
        : std::runtime_error(msg), min_eigenvalue(min_eig) {}
};

// Chart inversion or coordinate change failed (singular Jacobian,
// Newton did not converge, degenerate Hessian).
struct chart_error : std::runtime_error {
    explicit chart_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A structural precondition on exact data failed (isotropy, Lagrangian
// extension, polarization compatibility).
struct constraint_error : std::runtime_error {
    explicit constraint_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A model value violates its own invariants (non-symmetric period matrix,
// non-positive residue block, not quasi-unipotent, ...).
struct model_error : std::runtime_error {
    explicit model_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mesh or sweep resolution insufficient (disconnected mesh, covering or
// quadrature did not converge under refinement).
struct resolution_error : std::runtime_error {
    explicit resolution_error(const std::string& msg) : std::runtime_error(msg) {}
};

// File / serialization problems.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace skfib
