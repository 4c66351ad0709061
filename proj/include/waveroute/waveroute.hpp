// SPDX-FileCopyrightText: © 2026 The waveroute Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "waveroute/circuit.hpp"
#include "waveroute/convolution.hpp"
#include "waveroute/errors.hpp"
#include "waveroute/fractal.hpp"
#include "waveroute/geometry.hpp"
#include "waveroute/haar.hpp"
#include "waveroute/io.hpp"
#include "waveroute/kernels.hpp"
#include "waveroute/mesh.hpp"
#include "waveroute/optics.hpp"
#include "waveroute/parallel.hpp"
#include "waveroute/scaling.hpp"
#include "waveroute/toolpath.hpp"
#include "waveroute/validator.hpp"
