#pragma once

#include "aml/algebra.hpp"
#include "aml/crossing.hpp"
#include "aml/error.hpp"
#include "aml/index_set.hpp"
#include "aml/inference.hpp"
#include "aml/learner.hpp"
#include "aml/metrics.hpp"
#include "aml/problems/idx.hpp"
#include "aml/problems/images.hpp"
#include "aml/problems/queens.hpp"
#include "aml/problems/relation_dsl.hpp"
#include "aml/queens_protocol.hpp"
#include "aml/reduction.hpp"
#include "aml/rng.hpp"
#include "aml/snapshot.hpp"
#include "aml/trace.hpp"
#include "aml/trainer.hpp"
