#pragma once

#include "facegen/attributes.hpp"
#include "facegen/error.hpp"
#include "facegen/face_model.hpp"
#include "facegen/features.hpp"
#include "facegen/impression.hpp"
#include "facegen/mesh.hpp"
#include "facegen/optimizer.hpp"
#include "facegen/priors.hpp"
#include "facegen/render.hpp"
#include "facegen/rng.hpp"
#include "facegen/scorer.hpp"
#include "facegen/similarity.hpp"
#include "facegen/synthetic.hpp"
#include "facegen/training.hpp"
