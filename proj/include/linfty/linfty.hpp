#pragma once

#include "linfty/fd.hpp"
#include "linfty/hamiltonian.hpp"
#include "linfty/inclusion.hpp"
#include "linfty/maps.hpp"
#include "linfty/matrix.hpp"
#include "linfty/ode.hpp"
#include "linfty/operators.hpp"
#include "linfty/report.hpp"
#include "linfty/sampling.hpp"
#include "linfty/tensor_ops.hpp"
#include "linfty/verify.hpp"
