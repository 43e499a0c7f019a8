#pragma once

#include "framekit/errors.hpp"
#include "framekit/matrix.hpp"
#include "framekit/linalg.hpp"
#include "framekit/frame.hpp"
#include "framekit/reconstruct.hpp"
#include "framekit/random.hpp"
#include "framekit/verifier.hpp"
