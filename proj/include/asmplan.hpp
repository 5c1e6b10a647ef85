#pragma once

// Core library: graphs, evaluation, geometry, losses and the simulator.
// The manual pipeline (asmplan/vlm/*) needs OpenSSL and is included separately.

#include "asmplan/baselines.hpp"
#include "asmplan/error.hpp"
#include "asmplan/eval_corpus.hpp"
#include "asmplan/eval_report.hpp"
#include "asmplan/geometry/cloud_io.hpp"
#include "asmplan/geometry/frame_alignment.hpp"
#include "asmplan/geometry/kd_tree.hpp"
#include "asmplan/geometry/metrics.hpp"
#include "asmplan/geometry/pca.hpp"
#include "asmplan/geometry/point_cloud.hpp"
#include "asmplan/geometry/pose.hpp"
#include "asmplan/geometry/pose_json.hpp"
#include "asmplan/graph.hpp"
#include "asmplan/item_file.hpp"
#include "asmplan/nested_list.hpp"
#include "asmplan/objectives.hpp"
#include "asmplan/orders.hpp"
#include "asmplan/plan_eval.hpp"
#include "asmplan/random.hpp"
#include "asmplan/sampler.hpp"
#include "asmplan/sim/executor.hpp"
#include "asmplan/sim/grasp.hpp"
#include "asmplan/sim/rrt_connect.hpp"
#include "asmplan/sim/scenario.hpp"
#include "asmplan/sim/world.hpp"
