#pragma once

#include "ctxalign/alignment.hpp"
#include "ctxalign/csv.hpp"
#include "ctxalign/errors.hpp"
#include "ctxalign/io.hpp"
#include "ctxalign/ontology.hpp"
#include "ctxalign/relations.hpp"
#include "ctxalign/similarity.hpp"
#include "ctxalign/text.hpp"
#include "ctxalign/version.hpp"
