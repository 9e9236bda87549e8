#pragma once

#include "specshadow/error.hpp"
#include "specshadow/obstruct/obstruct.hpp"
#include "specshadow/pencil/certificate.hpp"
#include "specshadow/pencil/membership.hpp"
#include "specshadow/pencil/pencil.hpp"
#include "specshadow/poly/io.hpp"
#include "specshadow/poly/monomial.hpp"
#include "specshadow/poly/polynomial.hpp"
#include "specshadow/poly/reduce.hpp"
#include "specshadow/poly/scalar.hpp"
#include "specshadow/relax/certificate.hpp"
#include "specshadow/relax/gram_system.hpp"
#include "specshadow/relax/relax.hpp"
#include "specshadow/relax/sets.hpp"
#include "specshadow/sdp/problem.hpp"
#include "specshadow/sdp/solver.hpp"
#include "specshadow/sdp/sym_matrix.hpp"
#include "specshadow/verdict.hpp"
