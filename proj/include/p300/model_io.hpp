#pragma once

#include <string>

#include "p300/classifiers.hpp"

namespace p300 {

// Versioned flat model file: text header, then little-endian float64
// coefficients.
//
//   p300model 1
//   family <BAYES_LDA|SVM|LASSO_GLM>
//   dim <d>
//   payload
//   BAYES_LDA: mu0[d] mu1[d] sigma_inv[d*d] log_prior0 log_prior1 shrinkage
//   SVM:       w[d] b C
//   LASSO_GLM: beta0 beta[d] lambda
void save_model(const TrainedClassifier& clf, const std::string& path);
TrainedClassifier load_model(const std::string& path);

}  // namespace p300
