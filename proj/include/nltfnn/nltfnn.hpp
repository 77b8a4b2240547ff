#pragma once

#include "admm.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "prox.hpp"
#include "tensor.hpp"
#include "transform.hpp"
#include "tv.hpp"
