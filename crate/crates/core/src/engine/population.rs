//! Initial population: ages, Pareto wages, occupations and names.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Pareto;

use super::config::PopulationParams;

/// Working-age population by age band (inclusive bounds, millions of people),
/// rounded from 2018 U.S. Census estimates.
const AGE_BANDS: [(u32, u32, f64); 9] = [
    (18, 24, 30.4),
    (25, 29, 23.3),
    (30, 34, 22.1),
    (35, 39, 21.2),
    (40, 44, 19.9),
    (45, 49, 20.6),
    (50, 54, 21.0),
    (55, 59, 21.9),
    (60, 60, 4.2),
];

/// Ten representative job titles per income decile, lowest decile first.
const OCCUPATIONS: [[&str; 10]; 10] = [
    ["Cashier", "Dishwasher", "Fast Food Cook", "Farmworker", "Host", "Parking Attendant", "Amusement Park Attendant", "Laundry Worker", "Server", "Usher"],
    ["Retail Salesperson", "Housekeeper", "Home Health Aide", "Childcare Worker", "Barista", "Janitor", "Stocker", "Bartender", "Hairdresser", "Security Guard"],
    ["Warehouse Associate", "Receptionist", "Delivery Driver", "Landscaper", "Cook", "Bank Teller", "Pharmacy Technician", "Teacher Assistant", "Call Center Agent", "Packer"],
    ["Customer Service Representative", "Medical Assistant", "Forklift Operator", "Office Clerk", "Painter", "Mail Carrier", "Bus Driver", "Machine Operator", "Data Entry Clerk", "Veterinary Technician"],
    ["Administrative Assistant", "Bookkeeper", "Truck Driver", "Carpenter", "Welder", "Licensed Practical Nurse", "Auto Mechanic", "Insurance Clerk", "Dental Assistant", "Paralegal"],
    ["Electrician", "Plumber", "HVAC Technician", "Police Officer", "Firefighter", "Teacher", "Social Worker", "Graphic Designer", "Sales Representative", "Lab Technician"],
    ["Accountant", "Registered Nurse", "Web Developer", "Construction Manager", "Market Research Analyst", "Loan Officer", "Dental Hygienist", "Civil Engineer", "Human Resources Specialist", "Real Estate Agent"],
    ["Software Developer", "Financial Analyst", "Mechanical Engineer", "Physical Therapist", "Operations Manager", "Pharmacist", "Management Consultant", "Data Scientist", "Electrical Engineer", "Architect"],
    ["Senior Software Engineer", "Nurse Practitioner", "Actuary", "Marketing Manager", "Lawyer", "IT Manager", "Physician Assistant", "Finance Manager", "Aerospace Engineer", "Product Manager"],
    ["Physician", "Surgeon", "Chief Executive", "Dentist", "Investment Banker", "Airline Pilot", "Engineering Director", "Orthodontist", "Partner at a Law Firm", "Anesthesiologist"],
];

const FIRST_NAMES: [&str; 40] = [
    "Ada", "Amir", "Beatriz", "Brandon", "Chen", "Chloe", "Daniel", "Darnell", "Elena", "Emeka", "Fatima", "Gabriel",
    "Grace", "Hannah", "Hiroshi", "Isabel", "Jamal", "Jasmine", "Kevin", "Keiko", "Laura", "Luis", "Maya", "Mohammed",
    "Nadia", "Nathan", "Olivia", "Omar", "Priya", "Rafael", "Rosa", "Samuel", "Sofia", "Tariq", "Tyler", "Uma",
    "Victor", "Wei", "Yolanda", "Zoe",
];

const LAST_NAMES: [&str; 40] = [
    "Adams", "Alvarez", "Baker", "Brown", "Campbell", "Chen", "Clark", "Davis", "Diaz", "Edwards", "Evans", "Garcia",
    "Gonzalez", "Green", "Hall", "Harris", "Hernandez", "Jackson", "Johnson", "Kim", "Lee", "Lopez", "Martin",
    "Martinez", "Miller", "Moore", "Nguyen", "Okafor", "Patel", "Perez", "Robinson", "Rodriguez", "Sanchez", "Singh",
    "Smith", "Taylor", "Thomas", "Walker", "Williams", "Wilson",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub name: String,
    pub age: u32,
    pub occupation: String,
    pub hourly_wage: f64,
    pub reservation_wage: f64,
}

pub fn draw_age<R: Rng + ?Sized>(rng: &mut R) -> u32 {
    let weights = WeightedIndex::new(AGE_BANDS.iter().map(|b| b.2)).expect("static weights");
    let (lo, hi, _) = AGE_BANDS[weights.sample(rng)];
    rng.random_range(lo..=hi)
}

/// Income decile of `wage` under the Pareto wage distribution.
pub fn wage_decile(wage: f64, params: &PopulationParams) -> usize {
    let cdf = 1.0 - (params.wage_scale / wage).powf(params.wage_shape);
    ((cdf * 10.0).floor().max(0.0) as usize).min(9)
}

pub fn wage_distribution(params: &PopulationParams) -> Result<Pareto<f64>, String> {
    Pareto::new(params.wage_scale, params.wage_shape).map_err(|e| format!("invalid wage distribution: {e}"))
}

/// Draws one household profile. Consumes the agent's own stream only.
pub fn draw_profile<R: Rng + ?Sized>(rng: &mut R, wages: &Pareto<f64>, params: &PopulationParams) -> Profile {
    let age = draw_age(rng);
    let hourly_wage = wages.sample(rng);
    let decile = wage_decile(hourly_wage, params);
    let occupation = OCCUPATIONS[decile][rng.random_range(0..10)].to_owned();
    let name = format!(
        "{} {}",
        FIRST_NAMES[rng.random_range(0..FIRST_NAMES.len())],
        LAST_NAMES[rng.random_range(0..LAST_NAMES.len())]
    );
    let reservation_wage = hourly_wage * rng.random_range(0.7..1.0);
    Profile { name, age, occupation, hourly_wage, reservation_wage }
}
