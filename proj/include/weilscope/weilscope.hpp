#pragma once

#include "weilscope/errors.hpp"
#include "weilscope/number_theory.hpp"
#include "weilscope/rational.hpp"
#include "weilscope/field.hpp"
#include "weilscope/parallel.hpp"
#include "weilscope/weil.hpp"
#include "weilscope/exponent.hpp"
#include "weilscope/multiplicity.hpp"
#include "weilscope/verify.hpp"
#include "weilscope/report.hpp"
