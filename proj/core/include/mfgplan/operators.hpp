#pragma once

#include "mfgplan/grid.hpp"

namespace mfgplan {

// Discrete calculus on the periodic torus, applied slice by slice.
//
// gradient maps cell values to face values with the forward difference
// (f(i+1) - f(i)) / dx, which is the centred difference about the face
// x_{i+1/2}. divergence maps face values back to cells with the backward
// difference. Under the quadrature inner product the two are exact negative
// adjoints, and laplacian is their composition (the compact 3-point stencil).

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& w);
ScalarField laplacian(const ScalarField& f);

// Cell-centred |Df|^2: per axis, the mean of the squared forward and backward
// differences. Second-order accurate at the cell centre.
ScalarField gradient_norm_sq(const ScalarField& f);

// Rectangle-rule integral of slice k over the unit torus.
double integrate(const ScalarField& f, int k);
double integrate(std::span<const double> slice, const TorusGrid& grid);

// Quadrature inner products: sum over all slices of the spatial rectangle rule.
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);

// Throws mfgplan::Error when the two fields do not share grid and time layout.
void require_compatible(const ScalarField& a, const ScalarField& b, const char* what);

}  // namespace mfgplan
