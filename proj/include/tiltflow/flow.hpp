#pragma once

#include "tiltflow/lattice.hpp"
#include "tiltflow/maxflow.hpp"

namespace tiltflow {

/// Flow from the top to the bottom of the cylinder.
inline FlowResult phi(const CylinderGraph& graph, const CapacityMap& caps) {
  return max_flow(graph, caps, graph.top(), graph.bottom());
}

/// Flow constrained by the boundary condition (k, theta_tilde).
inline FlowResult phi_kappa(const CylinderGraph& graph, const CapacityMap& caps, double k,
                            double theta_tilde) {
  const BoundaryCondition bc = split_boundary(graph, k, theta_tilde);
  return max_flow(graph, caps, bc.upper, bc.lower);
}

/// Flow under the flat condition (1/2, theta): the chord is the translate of
/// the basis through the centre of the cylinder.
inline FlowResult tau(const CylinderGraph& graph, const CapacityMap& caps) {
  return phi_kappa(graph, caps, 0.5, graph.spec().theta);
}

}  // namespace tiltflow
