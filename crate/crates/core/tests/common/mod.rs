pub mod smtlib;
