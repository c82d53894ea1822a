#include "cpnp/errors.hpp"

namespace cpnp {

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::Input: return "input";
    case Stage::Projection: return "projection";
    case Stage::BuildSystem: return "build_system";
    case Stage::VarianceEstimation: return "variance_estimation";
    case Stage::BiasedSolve: return "biased_solve";
    case Stage::BiasEliminatedSolve: return "bias_eliminated_solve";
    case Stage::PoseRecovery: return "pose_recovery";
    case Stage::So3Projection: return "so3_projection";
    case Stage::GnRefinement: return "gn_refinement";
    case Stage::Generator: return "generator";
  }
  return "unknown";
}

}  // namespace cpnp
