#pragma once

// Social network user embeddings: contrastive training of a content-based
// representation module over typed, directed, weighted first-order edges,
// with inductive downstream application.

#include "sllm/adam.hpp"
#include "sllm/checkpoint.hpp"
#include "sllm/dataset.hpp"
#include "sllm/dense.hpp"
#include "sllm/embedding_io.hpp"
#include "sllm/errors.hpp"
#include "sllm/experiment.hpp"
#include "sllm/gradcheck.hpp"
#include "sllm/heads.hpp"
#include "sllm/loss.hpp"
#include "sllm/matrix.hpp"
#include "sllm/metrics.hpp"
#include "sllm/model.hpp"
#include "sllm/pca.hpp"
#include "sllm/rng.hpp"
#include "sllm/svg.hpp"
#include "sllm/synthgen.hpp"
#include "sllm/text.hpp"
#include "sllm/train.hpp"
