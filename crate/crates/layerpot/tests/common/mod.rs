#![allow(dead_code)]
pub mod fd;
