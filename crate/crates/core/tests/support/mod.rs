pub mod jc_oracle;
