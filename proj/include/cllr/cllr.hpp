#pragma once

#include "cllr/action.hpp"
#include "cllr/actl.hpp"
#include "cllr/equations.hpp"
#include "cllr/error.hpp"
#include "cllr/io.hpp"
#include "cllr/parser.hpp"
#include "cllr/refinement.hpp"
#include "cllr/semantics.hpp"
#include "cllr/syntax.hpp"
#include "cllr/term.hpp"
